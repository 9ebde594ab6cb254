"""``nlsg`` command line.

Exit status: 0 on success, 1 on a computational error or a failed check,
2 on a usage error.  Numbers go to stdout as CSV or plain text; progress and
summaries go to stderr, so stdout is byte-identical for a given seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

from . import basegraph, construction, cotype, experiments, graph_ops, spectral, verify
from .errors import NlsgError
from .multigraph import Multigraph, load, to_text
from .poincare import KernelSpace, gamma_plus_exact, gamma_plus_search, real_line_kernel, uniform_kernel
from .rng import default_seed

PRODUCTS = ("zigzag", "replacement", "tensor", "power", "cesaro", "edge-complete")


class UsageError(Exception):
    pass


def read_graph(src: str) -> Multigraph:
    """A graph file (nlsg-graph v1 or edge list) or ``builtin:NAME``."""
    if src.startswith("builtin:"):
        return construction.builtin_base(src.split(":", 1)[1])
    return load(src)


def graph_id(src: str) -> str:
    return src.split(":", 1)[1] if src.startswith("builtin:") else Path(src).stem


def parse_kernel(spec: str, p: float) -> KernelSpace:
    """``uniform:K`` (K-point equilateral metric) or ``line:x1,x2,...`` (points on the real line)."""
    kind, _, arg = spec.partition(":")
    if kind == "uniform":
        return uniform_kernel(int(arg or 2), p)
    if kind == "line":
        return real_line_kernel([float(x) for x in arg.split(",") if x], p)
    raise UsageError(f"unknown kernel {spec!r}; use uniform:K or line:x1,x2,...")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------------

def cmd_product(a) -> int:
    G1 = read_graph(a.graph)
    binary = a.op in ("zigzag", "replacement", "tensor")
    if binary and not a.other:
        raise UsageError(f"{a.op} needs a second graph")
    if a.op == "zigzag":
        G = graph_ops.zigzag(G1, read_graph(a.other), a.cap)
    elif a.op == "replacement":
        G = graph_ops.replacement(G1, read_graph(a.other), a.cap)
    elif a.op == "tensor":
        G = graph_ops.tensor(G1, read_graph(a.other), a.cap)
    elif a.op == "power":
        G = graph_ops.power(G1, a.t, a.cap)
    elif a.op == "cesaro":
        G = graph_ops.cesaro(G1, a.t, a.cap)
    else:
        if a.degree is None:
            raise UsageError("edge-complete needs --degree")
        G = graph_ops.edge_complete(G1, a.degree)
    _emit(to_text(G), a.output)
    return 0


def cmd_spectrum(a) -> int:
    rows = [spectral.CSV_HEADER]
    for src in a.graphs:
        G = read_graph(src)
        rows.append(spectral.csv_row(graph_id(src), G, spectral.spectrum(G, seed=a.seed)))
    _emit("".join(rows), a.output)
    return 0


def cmd_gamma(a) -> int:
    K = parse_kernel(a.kernel, a.p)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["graph_id", "kernel", "kind", "value", "witness"])
    for src in a.graphs:
        A = read_graph(src).normalized_adjacency()
        if a.search:
            est = gamma_plus_search(A, K, a.restarts, a.seed)
        else:
            est = gamma_plus_exact(A, K, cap=a.cap, workers=a.workers)
        wr.writerow([graph_id(src), a.kernel, est.kind, spectral.fmt_value(est.value), est.witness_hash()])
    _emit(buf.getvalue(), a.output)
    return 0


def cmd_cotype(a) -> int:
    if a.decay:
        rows = cotype.decay_sweep(a.seed, a.instances)
        bad = sum(not r.holds for r in rows)
        fmt = spectral.fmt_value
        lines = ["m,gamma,gamma_cesaro,bound,holds\n"]
        lines += [f"{r.m},{fmt(r.gamma)},{fmt(r.gamma_cesaro)},{fmt(r.bound)},{r.holds}\n" for r in rows]
        _emit("".join(lines), a.output)
        print(f"decay: {bad} violations over {len(rows)} instances", file=sys.stderr)
        return 1 if bad else 0
    rows = cotype.cotype_sweep(a.seed, a.instances)
    _emit(cotype.sweep_csv(rows), a.output)
    c2 = max(r.minimal_C2 for r in rows)
    disp = all(r.displacement_ok for r in rows)
    print(f"cotype: max minimal C^2 {c2:.6g} (frozen {cotype.COTYPE_C2:.6g}), displacement "
          f"{'ok' if disp else 'BROKEN'}", file=sys.stderr)
    return 0 if disp and c2 <= cotype.COTYPE_C2 else 1


def cmd_basegraph(a) -> int:
    H, rep = basegraph.build_base(a.n, a.t, seed=a.seed, p=a.p, trials=a.trials, restarts=a.restarts)
    if a.graph_out:
        Path(a.graph_out).write_text(to_text(H))
    _emit(basegraph.reports_csv([rep]) if a.csv else rep.text() + "\n", a.output)
    lo, hi = basegraph.SANDWICH_BAND
    return 0 if lo <= rep.sandwich_min and rep.sandwich_max <= hi else 1


def cmd_construct(a) -> int:
    if a.plan:
        plan = construction.parse_plan(Path(a.plan).read_text(), root=Path(a.plan).parent)
    else:
        plan = construction.ConstructionPlan(read_graph(a.base), t0=a.t0, depth=a.depth, mode=a.mode,
                                             seed=a.seed, restarts=a.restarts, max_ports=a.cap)
    if plan.mode == "classical_power":
        levels = construction.rvw_iterate(plan)
    else:
        levels = construction.super_iterate(plan)
    _emit(construction.levels_csv(levels), a.output)
    if a.finish:
        H = levels[-1].graph
        rep = construction.finish_report(H, seed=plan.seed)
        print(f"finish: {H.n * H.d} vertices, degree 9, gamma_+ {rep.gamma_plus_output:.6g} "
              f"(bound {rep.degree_bound:.6g})", file=sys.stderr)
        if not rep.ok:
            return 1
    return 0 if all(lv.bound_ok for lv in levels) else 1


def cmd_counterexample(a) -> int:
    rep = experiments.counterexample(sizes=[2**k for k in range(a.min_log, a.max_log + 1)], ts=a.ts,
                                     seed=a.seed, p=a.p, workers=a.workers)
    _emit(rep.growth_csv(), a.output)
    if a.fit_output:
        Path(a.fit_output).write_text(rep.fit_csv())
    print(rep.summary(), file=sys.stderr)
    return 0 if rep.ok else 1


def cmd_verify(a) -> int:
    names = a.suite or list(verify.SUITES)
    unknown = [n for n in names if n not in verify.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {', '.join(verify.SUITES)}")

    def show(c):
        print(c.line(), flush=True)

    checks = verify.run_suites(names, on_result=show)
    failed = [c.key for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return 1 if failed else 0


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed(), help="root seed (default: $NLSG_SEED or 0)")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="parallel workers")
    common.add_argument("-o", "--output", help="write the main output here instead of stdout")

    ap = argparse.ArgumentParser(prog="nlsg", description="Expander and Poincare-inequality toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("product", parents=[common], help="graph products (writes nlsg-graph v1)")
    s.add_argument("op", choices=PRODUCTS)
    s.add_argument("graph")
    s.add_argument("other", nargs="?")
    s.add_argument("--t", type=int, default=2, help="power / Cesaro length")
    s.add_argument("--degree", type=int, help="target degree for edge-complete")
    s.add_argument("--cap", type=int, default=graph_ops.DEFAULT_MAX_PORTS, help="max vertex-port slots")
    s.set_defaults(fn=cmd_product)

    s = sub.add_parser("spectrum", parents=[common], help="lambda and gamma values as CSV")
    s.add_argument("graphs", nargs="+")
    s.set_defaults(fn=cmd_spectrum)

    s = sub.add_parser("gamma", parents=[common], help="non-linear gamma_+ against a finite kernel")
    s.add_argument("graphs", nargs="+")
    s.add_argument("--kernel", default="uniform:2", help="uniform:K or line:x1,x2,...")
    s.add_argument("--p", type=float, default=2.0, help="metric exponent")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exhaustive enumeration (default)")
    mode.add_argument("--search", action="store_true", help="local-search lower bound")
    s.add_argument("--restarts", type=int, default=10)
    s.add_argument("--cap", type=int, default=None, help="enumeration cap (configurations)")
    s.set_defaults(fn=cmd_gamma)

    s = sub.add_parser("cotype", parents=[common], help="randomized cotype or decay sweep")
    s.add_argument("--instances", type=int, default=1000)
    s.add_argument("--decay", action="store_true", help="run the Cesaro decay sweep instead")
    s.set_defaults(fn=cmd_cotype)

    s = sub.add_parser("basegraph", parents=[common], help="hypercube base graph pipeline")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--t", type=float, default=basegraph.DEFAULT_T)
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--restarts", type=int, default=10)
    s.add_argument("--csv", action="store_true")
    s.add_argument("--graph-out", help="write the quotient graph here")
    s.set_defaults(fn=cmd_basegraph)

    s = sub.add_parser("construct", parents=[common], help="iterative constructions")
    s.add_argument("--plan", help="plan file (key = value lines)")
    s.add_argument("--base", default="builtin:path16")
    s.add_argument("--mode", choices=construction.MODES, default="classical_power")
    s.add_argument("--t0", type=int, default=2)
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--restarts", type=int, default=5)
    s.add_argument("--cap", type=int, default=None)
    s.add_argument("--finish", action="store_true", help="also certify the degree-9 finisher on the last level")
    s.set_defaults(fn=cmd_construct)

    s = sub.add_parser("counterexample", parents=[common], help="Frechet growth table on random expanders")
    s.add_argument("--min-log", type=int, default=6)
    s.add_argument("--max-log", type=int, default=12)
    s.add_argument("--ts", type=int, nargs="+", default=list(experiments.DEFAULT_TS))
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--fit-output", help="write the per-t slope table here")
    s.set_defaults(fn=cmd_counterexample)

    s = sub.add_parser("verify", parents=[common], help="run the inequality suites")
    s.add_argument("--suite", action="append", help=f"one of: {', '.join(verify.SUITES)} (repeatable)")
    s.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        return a.fn(a)
    except UsageError as e:
        ap.error(str(e))
    except (OSError, ValueError, KeyError) as e:
        print(f"nlsg: error: {e}", file=sys.stderr)
        return 2
    except NlsgError as e:
        print(f"nlsg: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
