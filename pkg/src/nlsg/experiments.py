"""Growth experiment on random 4-regular expanders.

For each size the graph is built once; its BFS distance histogram and
closed-walk traces feed every Frechet bound, so the Cesaro graphs themselves
are never materialised.  The Cesaro graph indexed by t uses m = t + 1
(walk lengths 0..t).
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import Disconnected
from .multigraph import Multigraph, random_regular
from .poincare import cesaro_frechet_lower_bound, distance_histogram, frechet_lower_bound, walk_return_traces
from .rng import child_seed
from .spectral import spectrum

DEFAULT_SIZES = tuple(2**k for k in range(6, 13))
DEFAULT_TS = (1, 2, 4, 8)
DEGREE = 4
SPECTRAL_DENSE_LIMIT = 1024
MAX_ATTEMPTS = 16
GROWTH_HEADER = ["n", "t", "m", "x", "frechet_cesaro", "frechet_graph", "gamma_plus_spectral"]


def growth_coordinate(n: int, t: int) -> float:
    """(log(1 + log n / t))^2, natural logs."""
    return math.log1p(math.log(n) / t) ** 2


def connected_expander(n: int, d: int, seed: int) -> tuple[Multigraph, np.ndarray]:
    """First connected simple d-regular sample in the seed's child stream, with its histogram."""
    for attempt in range(MAX_ATTEMPTS):
        G = random_regular(n, d, child_seed(seed, attempt), simple=True)
        try:
            return G, distance_histogram(G)
        except Disconnected:
            continue
    raise Disconnected(f"no connected {d}-regular sample on {n} vertices in {MAX_ATTEMPTS} attempts")


@dataclass(frozen=True)
class SizeResult:
    n: int
    seed: int
    frechet_graph: float
    gamma_plus_spectral: float
    frechet_cesaro: dict          # t -> bound for the m = t + 1 Cesaro graph


def _one_size(args) -> SizeResult:
    n, d, seed, ts, p = args
    G, hist = connected_expander(n, d, seed)
    traces = walk_return_traces(G, max(ts))
    ces = {t: float(cesaro_frechet_lower_bound(G, t + 1, p, hist, traces).value) for t in ts}
    gp = spectrum(G, dense_limit=SPECTRAL_DENSE_LIMIT, seed=seed & 0xFFFF).gamma_plus
    return SizeResult(n, seed, float(frechet_lower_bound(G, p, hist).value), float(gp), ces)


def _non_decreasing(values, slack: float = 1e-12) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) >= -slack * np.maximum(1.0, np.abs(v[:-1]))))


@dataclass
class CounterexampleReport:
    sizes: tuple
    ts: tuple
    p: float
    results: list
    slopes: dict = field(default_factory=dict)

    def series(self, t: int) -> np.ndarray:
        return np.array([r.frechet_cesaro[t] for r in self.results])

    @property
    def cesaro_monotone(self) -> dict:
        return {t: _non_decreasing(self.series(t)) for t in self.ts}

    @property
    def graph_monotone(self) -> bool:
        return _non_decreasing([r.frechet_graph for r in self.results])

    @property
    def spectral_range(self) -> tuple[float, float]:
        g = [r.gamma_plus_spectral for r in self.results]
        return min(g), max(g)

    @property
    def ok(self) -> bool:
        return all(self.cesaro_monotone.values()) and self.graph_monotone

    def growth_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(GROWTH_HEADER)
        for r in self.results:
            for t in self.ts:
                wr.writerow([r.n, t, t + 1, repr(growth_coordinate(r.n, t)), repr(r.frechet_cesaro[t]),
                             repr(r.frechet_graph), repr(r.gamma_plus_spectral)])
        return buf.getvalue()

    def fit_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["t", "slope", "monotone"])
        for t in self.ts:
            wr.writerow([t, repr(self.slopes[t]), self.cesaro_monotone[t]])
        return buf.getvalue()

    def summary(self) -> str:
        lo, hi = self.spectral_range
        mono = ", ".join(f"t={t}:{'yes' if v else 'NO'}" for t, v in self.cesaro_monotone.items())
        slopes = ", ".join(f"t={t}:{s:.4g}" for t, s in self.slopes.items())
        return "\n".join([
            f"sizes {list(self.sizes)}, p={self.p:g}",
            f"Cesaro Frechet bound non-decreasing in n: {mono}",
            f"fitted slopes against (log(1+log n/t))^2 (report only): {slopes}",
            f"graph Frechet bound non-decreasing in n: {'yes' if self.graph_monotone else 'NO'}",
            f"spectral gamma_+ range: [{lo:.6g}, {hi:.6g}]",
        ])


def counterexample(sizes=DEFAULT_SIZES, ts=DEFAULT_TS, seed: int = 0, p: float = 2.0, degree: int = DEGREE,
                   workers: int = 1) -> CounterexampleReport:
    """Frechet lower bounds for gamma_+ of Cesaro graphs of random expanders, by size.

    Size i draws its graph from child_seed(seed, i), so results do not depend on
    ``workers``.
    """
    sizes, ts = tuple(int(n) for n in sizes), tuple(int(t) for t in ts)
    if min(ts) < 1:
        raise ValueError("t must be >= 1")
    jobs = [(n, degree, child_seed(seed, i), ts, p) for i, n in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_one_size, jobs))
    else:
        results = [_one_size(j) for j in jobs]
    rep = CounterexampleReport(sizes, ts, p, results)
    for t in ts:
        x = np.array([growth_coordinate(n, t) for n in sizes])
        rep.slopes[t] = float(np.polyfit(x, rep.series(t), 1)[0]) if len(sizes) > 1 else math.nan
    return rep
