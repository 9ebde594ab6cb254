"""Iterative expander constructions built from the graph products.

* ``rvw_iterate``: G_1 = H^2, G_{i+1} = G_i^{t0} zigzag H.
* ``super_iterate``: F_1 = C_{d0^2}(F_0), F_{j+1} = C_{n0}(A_{t0}(F_j)) zigzag F_0.
* ``diagonalize``: collapses a table of families F_j(k) of growing degree
  into one family of constant degree.
* ``finish_degree9``: H zigzag (d-cycle with loops), which is 9-regular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .errors import PlanInfeasible
from .graph_ops import cesaro, cycle_with_loops, edge_complete, power, replacement, zigzag
from .multigraph import Multigraph, cycle, from_edge_list, load, random_regular
from .poincare import gamma_plus_search, real_line_kernel, uniform_kernel
from .rng import child_seed
from .spectral import INF, spectrum

CERTIFY_DENSE_LIMIT = 1024
SEARCH_LIMIT = 64
MODES = ("classical_power", "cesaro")
CHAIN_SLACK = 1e-9


def classical_threshold(t0: int) -> float:
    """Largest lambda(H) for which the classical iteration keeps lambda(G_i) <= 1/2."""
    return 1.0 - (2.0 - 2.0 ** (1 - t0)) ** -0.5


def _certify(G: Multigraph, seed: int = 0):
    return spectrum(G, dense_limit=CERTIFY_DENSE_LIMIT, seed=seed)


# -- plans --------------------------------------------------------------------

@dataclass
class ConstructionPlan:
    base: Multigraph
    t0: int = 2
    depth: int = 3
    mode: str = "classical_power"
    seed: int = 0
    kernels: tuple[str, ...] = ("two_point", "line3")
    restarts: int = 5
    max_ports: int | None = None
    base_path: str | None = None

    @property
    def n0(self) -> int:
        return self.base.n

    @property
    def d0(self) -> int:
        return self.base.d

    def check(self) -> "ConstructionPlan":
        if self.mode not in MODES:
            raise PlanInfeasible(f"unknown mode {self.mode!r}")
        if self.t0 < 1 or self.depth < 0:
            raise PlanInfeasible("t0 must be >= 1 and depth >= 0")
        if self.mode == "classical_power" and self.n0 != self.d0 ** (2 * self.t0):
            raise PlanInfeasible(f"classical mode needs n0 = d0^(2 t0): {self.n0} != {self.d0}^{2 * self.t0}")
        if self.mode == "cesaro":
            cd = cesaro_degree(self.d0**2, self.t0)
            if cd > self.n0:
                raise PlanInfeasible(f"Cesaro degree t0 d0^(2(t0-1)) = {cd} exceeds n0 = {self.n0}")
        return self

    def to_text(self) -> str:
        lines = [f"base = {self.base_path or '<inline>'}", f"mode = {self.mode}", f"t0 = {self.t0}",
                 f"depth = {self.depth}", f"seed = {self.seed}", f"kernels = {','.join(self.kernels)}",
                 f"restarts = {self.restarts}"]
        if self.max_ports is not None:
            lines.append(f"max_ports = {self.max_ports}")
        return "\n".join(lines) + "\n"


def parse_plan(text: str, root: str | Path = ".") -> ConstructionPlan:
    """Read ``key = value`` lines; ``base`` is a graph file path or ``builtin:NAME``."""
    kv = {}
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        key, sep, value = ln.partition("=")
        if not sep:
            raise ValueError(f"expected 'key = value', got {ln!r}")
        kv[key.strip()] = value.strip()
    unknown = set(kv) - {"base", "mode", "t0", "depth", "seed", "kernels", "restarts", "max_ports"}
    if unknown:
        raise ValueError(f"unknown plan keys: {sorted(unknown)}")
    if "base" not in kv:
        raise ValueError("plan needs a 'base' entry")
    src = kv["base"]
    if src.startswith("builtin:"):
        base = builtin_base(src.split(":", 1)[1])
    else:
        path = Path(src) if Path(src).is_absolute() else Path(root) / src
        base = load(path)
    return ConstructionPlan(
        base=base, t0=int(kv.get("t0", 2)), depth=int(kv.get("depth", 3)), mode=kv.get("mode", "classical_power"),
        seed=int(kv.get("seed", 0)), kernels=tuple(k for k in kv.get("kernels", "two_point,line3").split(",") if k),
        restarts=int(kv.get("restarts", 5)),
        max_ports=int(kv["max_ports"]) if "max_ports" in kv else None, base_path=src,
    )


def path_with_end_loops(n: int) -> Multigraph:
    """2-regular path 0 - 1 - ... - (n-1) with a loop at each end; connected and not bipartite."""
    loops = [0] * n
    loops[0] += 1
    loops[-1] += 1
    return from_edge_list(n, [(i, i + 1) for i in range(n - 1)], loops)


def builtin_base(name: str) -> Multigraph:
    if name == "path16":
        return path_with_end_loops(16)
    from .data import corpus_graph

    return corpus_graph(name)


def preset_size(k: int) -> tuple[int, float]:
    """The asymptotic preset: t0 = (2k)^{3k} and log n_{i0} >= (4 t0)^k (not runnable)."""
    t0 = (2 * k) ** (3 * k)
    return t0, float(4 * t0) ** k


# -- classical iteration ------------------------------------------------------------

@dataclass
class Level:
    index: int
    graph: Multigraph
    lam: float
    gamma_plus: float
    bound: float = INF          # recursion bound for this level (lambda or gamma_+)
    bound_ok: bool = True
    search: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def csv_row(self) -> str:
        vals = [self.index, self.graph.n, self.graph.d, f"{self.lam:.17g}", f"{self.gamma_plus:.17g}",
                f"{self.bound:.17g}", int(self.bound_ok)]
        return ",".join(str(v) for v in vals)


LEVEL_CSV_HEADER = "level,n,d,lambda,gamma_plus,bound,bound_ok"


def levels_csv(levels: Sequence[Level]) -> str:
    return LEVEL_CSV_HEADER + "\n" + "".join(lv.csv_row() + "\n" for lv in levels)


def rvw_iterate(plan: ConstructionPlan, levels: int | None = None) -> list[Level]:
    """G_1..G_depth with lambda and the per-level bound 1 - (1 - lambda(G_i)^t0)(1 - lambda(H))^2."""
    plan = plan.check()
    if plan.mode != "classical_power":
        raise PlanInfeasible("rvw_iterate needs classical_power mode")
    H, t0 = plan.base, plan.t0
    lam_h = spectrum(H).lambda_abs
    depth = plan.depth if levels is None else levels
    out: list[Level] = []
    G = None
    for i in range(1, depth + 1):
        if G is None:
            G = power(H, 2, plan.max_ports)
            bound = lam_h**2
        else:
            G = zigzag(power(G, t0, plan.max_ports), H, plan.max_ports)
            bound = 1 - (1 - out[-1].lam**t0) * (1 - lam_h) ** 2
        rep = _certify(G, plan.seed)
        lam = rep.lambda_abs
        out.append(Level(i, G, lam, rep.gamma_plus, bound, lam <= bound + CHAIN_SLACK))
    return out


# -- super-expander recursion ------------------------------------------------------

def cesaro_degree(d: int, m: int) -> int:
    """Degree of the Cesaro graph: one edge class per walk length, m d^(m-1) in all."""
    return m * d ** (m - 1)


def _kernels(labels: Sequence[str]) -> dict:
    table = {"two_point": uniform_kernel(2), "three_point": uniform_kernel(3),
             "line3": real_line_kernel([0.0, 1.0, 3.0])}
    unknown = set(labels) - set(table)
    if unknown:
        raise ValueError(f"unknown kernels {sorted(unknown)}; choose from {sorted(table)}")
    return {k: table[k] for k in labels}


def _search(G: Multigraph, plan: ConstructionPlan, salt: int) -> dict:
    if G.n > SEARCH_LIMIT:
        return {}
    A = G.normalized_adjacency()
    return {label: gamma_plus_search(A, K, plan.restarts, child_seed(plan.seed, salt)).value
            for label, K in _kernels(plan.kernels).items()}


def super_iterate(plan: ConstructionPlan) -> list[Level]:
    """F_0 .. F_depth with spectral gamma_+ and the bound 2 gamma_+(A_t0(F_j)) gamma_+(F_0)^2."""
    plan = plan.check()
    if plan.mode != "cesaro":
        raise PlanInfeasible("super_iterate needs cesaro mode")
    F0, t0, n0, d0 = plan.base, plan.t0, plan.n0, plan.d0
    rep0 = _certify(F0, plan.seed)
    g0 = rep0.gamma_plus
    out = [Level(0, F0, rep0.lambda_abs, g0, search=_search(F0, plan, 0))]
    if plan.depth >= 1:
        F1 = edge_complete(F0, d0 * d0)
        rep = _certify(F1, plan.seed)
        # edge completion at most doubles gamma_+
        out.append(Level(1, F1, rep.lambda_abs, rep.gamma_plus, 2 * g0, rep.gamma_plus <= 2 * g0 * (1 + CHAIN_SLACK),
                         search=_search(F1, plan, 1)))
    for j in range(1, plan.depth):
        Fj = out[-1].graph
        A = cesaro(Fj, t0, plan.max_ports)
        if A.d > n0:
            raise PlanInfeasible(f"Cesaro degree {A.d} exceeds n0 = {n0}")
        Cj = edge_complete(A, n0)
        F = zigzag(Cj, F0, plan.max_ports)
        rep = _certify(F, plan.seed)
        ga = _certify(A, plan.seed).gamma_plus
        bound = 2 * ga * g0 * g0
        lv = Level(j + 1, F, rep.lambda_abs, rep.gamma_plus, bound,
                   rep.gamma_plus <= bound * (1 + CHAIN_SLACK), search=_search(F, plan, j + 1))
        lv.notes.append(f"gamma_+(A_t0(F_{j})) = {ga:.12g}")
        out.append(lv)
    return out


# -- diagonalisation ----------------------------------------------------------------

@dataclass
class FamilyRow:
    """One family F_j(k), j = 0, 1, ...: common degree and strictly increasing sizes."""

    degree: int
    vertices: Sequence[int]
    graph: Callable[[int], Multigraph] | None = None

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.vertices, self.vertices[1:])):
            raise ValueError("vertex counts must be strictly increasing")


@dataclass
class Step:
    k: int
    i: int
    h: int
    threshold: int
    vertices: int
    degree: int


@dataclass
class Diagonal:
    m: list[int]                 # m_k, index k - 1
    j: list[int]                 # j(k), index k - 1
    steps: dict                  # k -> list[Step]
    graphs: dict = field(default_factory=dict)

    def final_degree(self, k: int) -> int:
        return self.steps[k][-1].degree

    def audit(self) -> str:
        lines = ["k,i,h,threshold,vertices,degree"]
        for k, steps in self.steps.items():
            lines += [f"{s.k},{s.i},{s.h},{s.threshold},{s.vertices},{s.degree}" for s in steps]
        return "\n".join(lines) + "\n"


def schedule_m(C: Sequence[float], eps: Sequence[float]) -> list[int]:
    """m_k = ceil((2 C_k^3)^(1/eps_k))."""
    return [math.ceil((2 * c**3) ** (1 / e)) for c, e in zip(C, eps)]


def diagonalize(table: Sequence[FamilyRow], C: Sequence[float], eps: Sequence[float], K: int | None = None,
                build: bool = False, max_ports: int | None = None) -> Diagonal:
    """Run the h_i(k) schedule for k = 1..K; needs table rows 1..K+1.

    L_k = F_{j(k)}(k) where j(k) is the least j with n_j(k) > max(k, m_{k+1} d_{k+1}^{2 m_{k+1}}).
    Starting from h_0 = k, h_1 is the least h with n_{j(h)}(h) > d_k and later h_i the least h
    with n_{j(h)}(h) > m_{h_{i-1}}^2 d_{h_{i-1}}^{2 m_{h_{i-1}}}; each step is
    L_{k,i} = A_{m_h}(C_{n_{j(h)}(h)}(L_{k,i-1}) zigzag L_h).  After h_i = 1 one more step with
    h = 1 is taken, so every output has the degree of a step with h = 1.
    """
    K = len(table) - 1 if K is None else K
    if K < 1 or len(table) < K + 1 or len(C) < K + 1 or len(eps) < K + 1:
        raise PlanInfeasible(f"diagonalisation to K = {K} needs table rows and constants for k = 1..{K + 1}")
    m = schedule_m(C, eps)
    d = [row.degree for row in table]
    jk: list[int] = []
    for k in range(1, K + 1):
        need = max(k, m[k] * d[k] ** (2 * m[k]))
        js = [j for j, nv in enumerate(table[k - 1].vertices) if nv > need]
        if not js:
            raise PlanInfeasible(f"row {k} has no level with more than {need} vertices")
        jk.append(js[0])

    def size(h: int) -> int:
        return table[h - 1].vertices[jk[h - 1]]

    def least_h(threshold: int) -> int | None:
        for h in range(1, K + 1):
            if size(h) > threshold:
                return h
        return None

    result = Diagonal(m, jk, {})
    for k in range(1, K + 1):
        # the h sequence: thresholds from the current degree, ending with a repeated h = 1
        hs: list[tuple[int, int]] = []
        h_prev = k
        while h_prev != 1:
            if hs:
                mp, dp = m[h_prev - 1], d[h_prev - 1]
                thr = mp * mp * dp ** (2 * mp)
            else:
                thr = d[k - 1]
            h = least_h(thr)
            if h is None:
                raise PlanInfeasible(f"k={k}, step {len(hs) + 1}: no table row has more than {thr} vertices")
            if h >= h_prev:
                raise PlanInfeasible(f"k={k}, step {len(hs) + 1}: h = {h} does not decrease from {h_prev}")
            hs.append((h, thr))
            h_prev = h
        hs.append((1, -1))
        steps: list[Step] = []
        verts, deg = size(k), d[k - 1]
        graph = table[k - 1].graph(jk[k - 1]) if build else None
        for i, (h, thr) in enumerate(hs, start=1):
            target = size(h)
            if deg > target:
                raise PlanInfeasible(f"k={k}, step {i}: degree {deg} above completion target {target}")
            mh = m[h - 1]
            new_deg = cesaro_degree(d[h - 1] ** 2, mh)
            if build:
                Lh = table[h - 1].graph(jk[h - 1])
                graph = cesaro(zigzag(edge_complete(graph, target), Lh, max_ports), mh, max_ports)
            verts *= target
            deg = new_deg
            steps.append(Step(k, i, h, thr, verts, deg))
        result.steps[k] = steps
        if build:
            result.graphs[k] = graph
    return result


# -- degree-9 finisher ------------------------------------------------------------

@dataclass
class FinishReport:
    n: int
    d: int
    gamma_plus_input: float
    gamma_plus_cycle: float        # spectral gamma_+ of the d-cycle with loops
    cycle_bound: float             # 4 d^2
    gamma_plus_output: float
    chain_bound: float             # gamma_+(H) gamma_+(C_d)^2
    degree_bound: float            # 16 d^4 gamma_+(H)

    @property
    def ok(self) -> bool:
        return (self.gamma_plus_output <= self.chain_bound * (1 + CHAIN_SLACK)
                and self.gamma_plus_output <= self.degree_bound * (1 + CHAIN_SLACK))


def finish_degree9(H: Multigraph, max_ports: int | None = None) -> Multigraph:
    """H zigzag (d-cycle with a loop at every vertex): 9-regular on n d vertices."""
    return zigzag(H, cycle_with_loops(H.d), max_ports)


def finish_report(H: Multigraph, out: Multigraph | None = None, seed: int = 0) -> FinishReport:
    out = finish_degree9(H) if out is None else out
    d = H.d
    gh = _certify(H, seed).gamma_plus
    gc = spectrum(cycle_with_loops(d)).gamma_plus
    go = _certify(out, seed).gamma_plus
    return FinishReport(H.n, d, gh, gc, 4.0 * d * d, go, gh * gc * gc, 16.0 * d**4 * gh)


def finish_degree3(H: Multigraph, max_ports: int | None = None) -> Multigraph:
    """(H zigzag C_d with loops) replacement C_9: 3-regular on 9 n d vertices."""
    return replacement(finish_degree9(H, max_ports), cycle(9), max_ports)


# -- base-graph search for the classical iteration ----------------------------------

@dataclass
class BaseCandidate:
    t0: int
    d0: int
    n0: int
    index: int                  # position in the candidate pool (0 is the structured graph for d0 = 2)
    lam: float
    graph: Multigraph

    @property
    def meets_threshold(self) -> bool:
        return self.lam <= classical_threshold(self.t0)


def search_classical_base(t0: int = 2, degrees: Sequence[int] = (2, 3, 4, 5, 6, 7, 8), tries: int = 20,
                    seed: int = 0, max_vertices: int = 4096) -> list[BaseCandidate]:
    """Best random d0-regular multigraph on d0^(2 t0) vertices, for each d0 that fits."""
    out = []
    for d0 in degrees:
        n0 = d0 ** (2 * t0)
        if n0 > max_vertices:
            continue
        best = None
        pool = [path_with_end_loops(n0)] if d0 == 2 else []
        pool += [random_regular(n0, d0, child_seed(seed, d0 * 1000 + s)) for s in range(tries)]
        for idx, G in enumerate(pool):
            lam = _certify(G).lambda_abs
            if best is None or lam < best.lam:
                best = BaseCandidate(t0, d0, n0, idx, lam, G)
        if best is not None:
            out.append(best)
    return out


def lambda_lower_bound(n: int, d: int) -> float:
    """Trace bound: lambda(H)^2 >= (n/d - 1)/(n - 1) for any d-regular multigraph on n vertices."""
    return math.sqrt(max(0.0, (n / d - 1) / (n - 1))) if n > 1 else 0.0
