"""Inequality suite: every check returns a named pass/fail record.

The suites are the library side of the acceptance tests and of ``nlsg verify``.
Each one draws its instances from a root seed, so a rerun reproduces the same
table.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import basegraph, construction, cotype, experiments
from .data import corpus
from .graph_ops import cesaro_matrix, double, zigzag
from .multigraph import StochasticMatrix, random_regular
from .poincare import gamma_exact, gamma_plus_exact, real_line_kernel, uniform_kernel
from .rng import child_seed, child_seeds, generator
from .spectral import INF, spectrum

REL = 1e-9
VERIFY_SEED = 20_251_018
COTYPE_VALIDATION_SEED = 918_273_645      # differs from the seed that froze the constants


@dataclass(frozen=True)
class Check:
    key: str
    passed: bool
    instances: int
    worst: float          # largest lhs/rhs (or the suite's own figure of merit)
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return (f"{'PASS' if self.passed else 'FAIL'}  {self.key:<34} n={self.instances:<5} "
                f"worst={self.worst:.6g}  {self.detail}")


def _le(lhs: float, rhs: float, rel: float = REL) -> bool:
    """lhs <= rhs up to a relative tolerance; infinity on the right absorbs anything."""
    if rhs == INF:
        return True
    if lhs == INF:
        return False
    return lhs <= rhs * (1 + rel) + rel


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == INF:
        return 0.0
    if lhs == INF:
        return INF
    return lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else INF)


def _gap_inverse(lam: float) -> float:
    return INF if lam >= 1 else 1.0 / (1.0 - lam)


def _timed(fn: Callable[..., Check]) -> Callable[..., Check]:
    def run(*a, **kw) -> Check:
        t = time.perf_counter()
        c = fn(*a, **kw)
        return Check(c.key, c.passed, c.instances, c.worst, c.detail, time.perf_counter() - t)
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# -- zigzag ------------------------------------------------------------------------

def corpus_zigzag_pairs():
    """(G1, G2) pairs from the shipped corpus with |V(G2)| = deg(G1)."""
    graphs = corpus()
    for a, G1 in graphs.items():
        for b, G2 in graphs.items():
            if G2.n == G1.d and G1.n * G1.d <= 4096:
                yield f"{a} z {b}", G1, G2


def _random_zigzag_pair(seed: int, max_n1: int, max_d1: int, max_d2: int):
    rng = generator(seed)
    n1 = int(rng.integers(1, max_n1 + 1))
    d1 = int(rng.integers(1, max_d1 + 1))
    d2 = int(rng.integers(1, max_d2 + 1))
    s1, s2 = (int(s) for s in rng.integers(0, 1 << 62, 2))
    return random_regular(n1, d1, s1), random_regular(d1, d2, s2)


@_timed
def check_zigzag_spectral(seed: int = VERIFY_SEED, instances: int = 200, with_corpus: bool = True) -> Check:
    """1/(1 - lambda(G1 z G2)) <= 1/(1 - lambda(G1)) * (1/(1 - lambda(G2)))^2, slack >= -1e-9."""
    pairs = [_random_zigzag_pair(s, 64, 8, 4) for s in child_seeds(seed, instances)]
    if with_corpus:
        pairs += [(G1, G2) for _, G1, G2 in corpus_zigzag_pairs()]
    worst_slack, worst = INF, 0.0
    for G1, G2 in pairs:
        lhs = _gap_inverse(spectrum(zigzag(G1, G2)).lambda_abs)
        rhs = _gap_inverse(spectrum(G1).lambda_abs) * _gap_inverse(spectrum(G2).lambda_abs) ** 2
        slack = INF if rhs == INF else (-INF if lhs == INF else rhs - lhs)
        worst_slack = min(worst_slack, slack)
        worst = max(worst, _ratio(lhs, rhs))
    return Check("zigzag-spectral", worst_slack >= -1e-9, len(pairs), worst, f"min slack {worst_slack:.3g}")


def small_zigzag_instances(seed: int = VERIFY_SEED, seeds_per_shape: int = 2, max_vertices: int = 10,
                           max_d2: int = 3):
    """Every shape (n1, d1, d2) with n1 >= 2 and n1 d1 <= max_vertices, several graphs each."""
    k = 0
    for n1 in range(2, max_vertices + 1):
        for d1 in range(1, max_vertices // n1 + 1):
            for d2 in range(1, max_d2 + 1):
                for s in range(seeds_per_shape):
                    G1 = random_regular(n1, d1, child_seed(seed, 2 * k))
                    G2 = random_regular(d1, d2, child_seed(seed, 2 * k + 1))
                    k += 1
                    yield G1, G2


@_timed
def check_zigzag_submultiplicative(seed: int = VERIFY_SEED, seeds_per_shape: int = 2) -> Check:
    """Exact gamma_+(G1 z G2) <= gamma_+(G1) gamma_+(G2)^2 for the 2-point metric, <= 10 vertices."""
    K = uniform_kernel(2)
    count, ok, worst = 0, True, 0.0
    for G1, G2 in small_zigzag_instances(seed, seeds_per_shape):
        lhs = gamma_plus_exact(zigzag(G1, G2).normalized_adjacency(), K).value
        rhs = gamma_plus_exact(G1.normalized_adjacency(), K).value * \
            gamma_plus_exact(G2.normalized_adjacency(), K).value ** 2
        ok &= _le(lhs, rhs)
        worst = max(worst, _ratio(lhs, rhs))
        count += 1
    return Check("zigzag-submultiplicative", ok and count >= 50, count, worst, "two-point metric, exact")


# -- doubling ----------------------------------------------------------------------

def _small_matrices(seed: int, count: int, max_n: int = 5):
    rng = generator(seed)
    for _ in range(count):
        n = int(rng.integers(2, max_n + 1))
        d = int(rng.integers(1, 5))
        yield random_regular(n, d, int(rng.integers(1 << 62))).normalized_adjacency()


@_timed
def check_doubling_sandwich(seed: int = VERIFY_SEED, instances: int = 60) -> Check:
    """(2/5) gamma(double A) <= gamma_+(A) <= 2 gamma(double A), 2-point metric, n <= 5."""
    K = uniform_kernel(2)
    ok, worst = True, 0.0
    for A in _small_matrices(child_seed(seed, 1), instances):
        gp = gamma_plus_exact(A, K).value
        gd = gamma_exact(double(A), K).value
        lower = INF if gd == INF else 0.4 * gd
        upper = 2 * gd
        ok &= _le(lower, gp) and _le(gp, upper)
        worst = max(worst, _ratio(lower, gp), _ratio(gp, upper))
    return Check("doubling-sandwich", ok, instances, worst, "factors 2/5 and 2")


@_timed
def check_doubling_commute(seed: int = VERIFY_SEED, instances: int = 60) -> Check:
    """gamma(double(A_m(A))) <= 9 gamma(A_m(double(A))) for m in {2, 3}, n <= 5."""
    K = uniform_kernel(2)
    rng = generator(child_seed(seed, 2))
    ok, worst = True, 0.0
    for A in _small_matrices(child_seed(seed, 3), instances):
        m = int(rng.integers(2, 4))
        lhs = gamma_exact(double(cesaro_matrix(A, m)), K).value
        rhs = 9 * gamma_exact(cesaro_matrix(double(A), m), K).value
        ok &= _le(lhs, rhs)
        worst = max(worst, _ratio(lhs, rhs))
    return Check("doubling-commute", ok, instances, worst, "factor 9, m in {2, 3}")


# -- Cesaro decay and cotype ---------------------------------------------------------

@_timed
def check_cesaro_decay(instances: int = 1000) -> Check:
    """gamma(A_m(A)) <= 12 C^2 max{1, gamma(A)/m} on the frozen-seed sweep."""
    rows = cotype.decay_sweep(cotype.DECAY_SWEEP_SEED, instances)
    bad = sum(not r.holds for r in rows)
    worst = max((r.ratio for r in rows if not math.isnan(r.ratio)), default=0.0)
    return Check("cesaro-decay", bad == 0, len(rows), worst, f"{bad} violations, C^2={cotype.COTYPE_C2:.6g}")


@_timed
def check_cotype(seed: int = COTYPE_VALIDATION_SEED, instances: int = 1000, martingale: int = 50) -> Check:
    """Displacement convexity on every instance, martingale orthogonality, frozen C^2 on fresh seeds."""
    rows = cotype.cotype_sweep(seed, instances)
    disp = all(r.displacement_ok for r in rows)
    c2 = max(r.minimal_C2 for r in rows)
    err = 0.0
    for s in child_seeds(seed ^ 0xA5A5, martingale):
        A, m, x = cotype.sweep_instance(s, max_n=32, max_m=16)
        rep = cotype.martingale_chain(A, m, x)
        err = max(err, abs(rep.total_increment - rep.endpoint) / max(rep.endpoint, 1e-300))
    ok = disp and c2 <= cotype.COTYPE_C2 and err <= 1e-10
    return Check("cotype", ok, len(rows), c2 / cotype.COTYPE_C2,
                 f"displacement {'ok' if disp else 'BROKEN'}, max C^2 {c2:.6g} (frozen {cotype.COTYPE_C2:.6g}), "
                 f"martingale rel err {err:.2g}")


# -- base graph ------------------------------------------------------------------------

BASE_SIZES = ((10, 10), (12, 12))       # (n, seed)


@_timed
def check_base_graph(sizes=BASE_SIZES, t: float = basegraph.DEFAULT_T, trials: int = 100) -> Check:
    """Sandwich ratios in [1/3, 3], quotient keeps the degree, coset functions have no low Fourier mass."""
    lo_band, hi_band = basegraph.SANDWICH_BAND
    ok, lo, hi, tail = True, INF, 0.0, 0.0
    for n, seed in sizes:
        H, rep = basegraph.build_base(n, t, seed=seed, trials=trials)
        lo, hi = min(lo, rep.sandwich_min), max(hi, rep.sandwich_max)
        tail = max(tail, rep.kn_tail_residual)
        ok &= rep.degree == rep.pre_quotient_degree == H.d
    ok &= lo_band <= lo and hi <= hi_band and tail < 1e-12
    return Check("base-graph", ok, len(sizes), hi, f"sandwich [{lo:.4g}, {hi:.4g}], tail residual {tail:.2g}")


# -- linear to non-linear ----------------------------------------------------------------

def random_doubly_stochastic(seed: int, max_n: int = 5, terms: int = 3) -> StochasticMatrix:
    """Symmetrised mixture of permutation matrices with integer weights (exact rationals)."""
    rng = generator(seed)
    n = int(rng.integers(2, max_n + 1))
    num = np.zeros((n, n), dtype=np.int64)
    for _ in range(terms):
        P = np.eye(n, dtype=np.int64)[rng.permutation(n)]
        num += int(rng.integers(1, 5)) * (P + P.T)
    return StochasticMatrix(num, int(num[0].sum()))


@_timed
def check_linear_to_nonlinear(seed: int = VERIFY_SEED, instances: int = 100) -> Check:
    """Exact gamma_+ against 3-point real configurations <= 64 / (1 - lambda)^2, n <= 5."""
    ok, worst = True, 0.0
    for s in child_seeds(child_seed(seed, 4), instances):
        A = random_doubly_stochastic(s)
        K = real_line_kernel(generator(s ^ 0x3C3C).standard_normal(3))
        lam = spectrum(A).lambda_abs
        bound = INF if lam >= 1 else 64.0 / (1.0 - lam) ** 2
        val = gamma_plus_exact(A, K).value
        ok &= _le(val, bound)
        worst = max(worst, _ratio(val, bound))
    return Check("linear-to-nonlinear", ok, instances, worst, "p = 2, real line")


# -- constructions ---------------------------------------------------------------------

CLASSICAL_BASE = "classical_base_t2"


@_timed
def check_classical_iteration(depth: int = 3) -> Check:
    """Shipped base under the t0 = 2 threshold, then lambda(G_i) <= 1/2 with exact counts."""
    H = construction.builtin_base(CLASSICAL_BASE)
    t0 = 2
    lam_h = spectrum(H).lambda_abs
    thr = construction.classical_threshold(t0)
    levels = construction.rvw_iterate(construction.ConstructionPlan(H, t0=t0, depth=depth))
    counts = all(lv.graph.n == H.n**lv.index and lv.graph.d == H.d**2 for lv in levels)
    half = all(lv.lam <= 0.5 for lv in levels)
    ok = lam_h <= thr and counts and half
    worst = max(lv.lam for lv in levels)
    return Check("classical-iteration", ok, len(levels), worst,
                 f"base lambda {lam_h:.4g} vs threshold {thr:.4g}; level lambdas "
                 + " ".join(f"{lv.lam:.4g}" for lv in levels) + f"; counts {'exact' if counts else 'WRONG'}")


@_timed
def check_finisher() -> Check:
    """finish_degree9 is 9-regular on n d vertices and gamma_+ <= 16 d^4 gamma_+(H) on the corpus."""
    ok, worst, graphs = True, 0.0, corpus()
    for H in graphs.values():
        out = construction.finish_degree9(H)
        rep = construction.finish_report(H, out)
        ok &= out.d == 9 and out.n == H.n * H.d and rep.ok
        worst = max(worst, _ratio(rep.gamma_plus_output, rep.degree_bound))
    return Check("finisher-degree9", ok, len(graphs), worst, "spectral gamma_+ against 16 d^4 gamma_+(H)")


@_timed
def check_counterexample(seed: int = VERIFY_SEED, workers: int = 1) -> Check:
    """Frechet bounds for Cesaro graphs of random expanders are non-decreasing in n."""
    rep = experiments.counterexample(seed=seed, workers=workers)
    lo, hi = rep.spectral_range
    slopes = " ".join(f"{s:.3g}" for s in rep.slopes.values())
    return Check("counterexample-growth", rep.ok, len(rep.sizes) * len(rep.ts), max(rep.slopes.values()),
                 f"slopes {slopes}; spectral gamma_+ in [{lo:.4g}, {hi:.4g}]")


SUITES: dict[str, tuple[Callable[..., Check], ...]] = {
    "zigzag": (check_zigzag_spectral, check_zigzag_submultiplicative),
    "doubling": (check_doubling_sandwich, check_doubling_commute),
    "decay": (check_cesaro_decay,),
    "cotype": (check_cotype,),
    "basegraph": (check_base_graph,),
    "linear": (check_linear_to_nonlinear,),
    "classical": (check_classical_iteration,),
    "finisher": (check_finisher,),
    "counterexample": (check_counterexample,),
}


def run_suites(names=None, on_result: Callable[[Check], None] | None = None) -> list[Check]:
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    out = []
    for name in names:
        for fn in SUITES[name]:
            c = fn()
            out.append(c)
            if on_result:
                on_result(c)
    return out


def table(checks: list[Check]) -> str:
    return "\n".join(c.line() for c in checks)
