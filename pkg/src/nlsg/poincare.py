"""Non-linear Poincare constants of finite kernel spaces.

For a symmetric stochastic A on n vertices and a kernel K on a finite set X,

    gamma_+(A, K) = sup_{f,g: V -> X}  [(1/n^2) sum_ij K(f_i, g_j)] / [(1/n) sum_ij a_ij K(f_i, g_j)]

and gamma(A, K) is the same supremum with g = f.  Configurations with 0/0
are skipped, x/0 with x > 0 is infinite, and a one-point X gives 1.

The exact engine enumerates f and maximises over g exactly: for fixed f the
ratio is a sum of per-vertex terms over a sum of per-vertex terms, so
Dinkelbach's iteration finds the optimal g in a few argmax passes.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csgraph

from .errors import Disconnected, EnumerationTooLarge, TriangleViolation
from .multigraph import Multigraph, StochasticMatrix, as_float_matrix
from .rng import child_seeds

INF = math.inf
DEFAULT_CAP = 2**34
CHUNK = 1 << 12
_TOL = 1e-12


@dataclass(frozen=True)
class KernelSpace:
    K: np.ndarray
    label: str = ""
    points: tuple = ()

    def __post_init__(self):
        K = np.array(self.K, dtype=float)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise ValueError("kernel must be a square matrix")
        if not np.array_equal(K, K.T):
            raise ValueError("kernel must be symmetric")
        if (K < 0).any():
            raise ValueError("kernel must be non-negative")
        K.setflags(write=False)
        object.__setattr__(self, "K", K)
        if not self.points:
            object.__setattr__(self, "points", tuple(range(K.shape[0])))

    @property
    def size(self) -> int:
        return self.K.shape[0]

    def is_uniform(self) -> bool:
        """Zero diagonal and a single off-diagonal value (full symmetric group acts)."""
        K = self.K
        if np.any(np.diag(K) != 0):
            return False
        off = K[~np.eye(self.size, dtype=bool)]
        return off.size == 0 or bool(np.all(off == off[0]))


@dataclass(frozen=True)
class PoincareEstimate:
    value: float
    kind: str  # "exact" or "lower_bound"
    f: tuple | None = None
    g: tuple | None = None
    notes: tuple = field(default=())

    @property
    def witness(self):
        return (self.f, self.g)

    def witness_hash(self) -> str:
        return hashlib.sha256(repr((self.f, self.g)).encode()).hexdigest()[:16]


# -- kernels ---------------------------------------------------------------------

def check_metric(d: np.ndarray) -> None:
    d = np.asarray(d, dtype=float)
    if not np.array_equal(d, d.T):
        raise ValueError("metric must be symmetric")
    if np.any(np.diag(d) != 0) or np.any(d < 0):
        raise ValueError("metric needs zero diagonal and non-negative entries")
    # d[i,k] > d[i,j] + d[j,k]; scan j to keep memory at O(n^2)
    n = d.shape[0]
    for j in range(n):
        excess = d - (d[:, j][:, None] + d[j, :][None, :])
        if np.any(excess > 1e-12 * max(1.0, float(d.max()))):
            i, k = map(int, np.argwhere(excess > 1e-12 * max(1.0, float(d.max())))[0])
            raise TriangleViolation((i, j, k))


def kernel_metric_power(d, p: float, check: bool = True, label: str | None = None) -> KernelSpace:
    """K = d**p for a finite metric d (triangle inequality checked unless disabled)."""
    d = np.asarray(d, dtype=float)
    if p <= 0:
        raise ValueError("p must be positive")
    if check:
        check_metric(d)
    return KernelSpace(d**p, label or f"metric^{p:g} on {d.shape[0]} points")


def uniform_kernel(k: int = 2, p: float = 2) -> KernelSpace:
    d = 1.0 - np.eye(k)
    return kernel_metric_power(d, p, label=f"{k}-point uniform metric^{p:g}")


def real_line_kernel(xs: Sequence[float], p: float = 2) -> KernelSpace:
    """|x - y|**p on a finite subset of the real line."""
    x = np.asarray(xs, dtype=float)
    return KernelSpace(np.abs(x[:, None] - x[None, :]) ** p, f"real line |.|^{p:g} on {x.size} points",
                       tuple(float(v) for v in x))


def log_linf_transform(r, p: float = 1.0):
    """(log(1 + r))**p with the natural log."""
    return np.log1p(np.asarray(r, dtype=float)) ** p


def kernel_log_linf(points, p: float) -> KernelSpace:
    """K(x, y) = (log(1 + ||x - y||_inf))**p for integer vectors."""
    P = np.asarray(points, dtype=np.int64)
    if P.ndim == 1:
        P = P[:, None]
    dist = np.abs(P[:, None, :] - P[None, :, :]).max(axis=2)
    # concave increasing transform of a metric with T(0) = 0 stays a metric
    t = np.linspace(0, 10, 101)
    T = log_linf_transform(t)
    assert T[0] == 0 and np.all(np.diff(T) > 0) and np.all(np.diff(T, 2) <= 1e-15)
    return KernelSpace(log_linf_transform(dist, p), f"l_inf under log(1+.), power {p:g}",
                       tuple(map(tuple, P.tolist())))


# -- ratio evaluation ------------------------------------------------------------

def _ratio(N: float, D: float, pos_edges: bool, pos_pairs: bool) -> float | None:
    if not pos_edges:
        return INF if pos_pairs else None
    return N / D


def evaluate(A, K: KernelSpace, f: Sequence[int], g: Sequence[int] | None = None) -> float | None:
    """Float ratio for one configuration; None for 0/0."""
    M = as_float_matrix(A)
    f = np.asarray(f)
    g = f if g is None else np.asarray(g)
    n = M.shape[0]
    Kfg = K.K[f][:, g]
    N = Kfg.sum() / n**2
    D = (M * Kfg).sum() / n
    return _ratio(N, D, bool(((M > 0) & (Kfg > 0)).any()), bool((Kfg > 0).any()))


def evaluate_exact(A, K: KernelSpace, f: Sequence[int], g: Sequence[int] | None = None):
    """Ratio in rational arithmetic (kernel floats taken at their exact binary value)."""
    if isinstance(A, StochasticMatrix):
        a = A.fractions()
    else:
        a = [[Fraction(float(x)) for x in row] for row in np.asarray(A, dtype=float)]
    g = f if g is None else g
    n = len(f)
    kern = [[Fraction(float(x)) for x in row] for row in K.K]
    N = sum(kern[f[i]][g[j]] for i in range(n) for j in range(n)) / n**2
    D = sum(a[i][j] * kern[f[i]][g[j]] for i in range(n) for j in range(n)) / n
    if D == 0:
        return INF if N > 0 else None
    return N / D


# -- exact engine ----------------------------------------------------------------

def _digits(idx: np.ndarray, n: int, k: int) -> np.ndarray:
    """f_i = i-th most significant base-k digit of idx."""
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % k


def _plan(A, K: KernelSpace, cap: int | None, pairs: bool):
    M = as_float_matrix(A)
    n, k = M.shape[0], K.size
    prune = K.is_uniform() and k > 1
    nf = k ** (n - 1) if prune else k**n
    work = nf * (k**n if pairs else 1)
    limit = DEFAULT_CAP if cap is None else cap
    if work > limit:
        raise EnumerationTooLarge(f"{work} configurations exceed the cap of {limit}")
    return M, n, k, nf


def _plus_chunk(M: np.ndarray, Kmat: np.ndarray, lo: int, hi: int):
    """Best (value, f index, g) over f indices in [lo, hi), starting from lambda = 0."""
    n, k = M.shape[0], Kmat.shape[0]
    support = M > 0
    best, best_idx, best_g = -1.0, -1, None
    MT = M.T
    for start in range(lo, hi, 256):
        idx = np.arange(start, min(hi, start + 256), dtype=np.int64)
        F = _digits(idx, n, k)
        Kf = Kmat[F]                                  # (B, n, k): K(f_i, x)
        c = Kf.sum(axis=1) / n**2                     # (B, k)
        D = np.einsum("ji,bix->bjx", MT, Kf) / n      # (B, n, k): D_j(x)
        # infinite ratio: every j has a zero-cost point and one of those has positive c
        zeroD = np.einsum("ji,bix->bjx", support.T.astype(np.int64), (Kf > 0).astype(np.int64)) == 0
        feasible = zeroD.any(axis=2).all(axis=1)
        hit = (zeroD & (c[:, None, :] > 0)).any(axis=(1, 2))
        inf_rows = np.flatnonzero(feasible & hit)
        if inf_rows.size:
            b = int(inf_rows[0])
            cz = np.where(zeroD[b], c[b][None, :], -1.0)
            g = np.argmax(zeroD[b], axis=1)
            j = int(np.argmax(cz.max(axis=1)))
            g[j] = int(np.argmax(cz[j]))
            return INF, int(idx[b]), tuple(int(x) for x in g)
        for b in range(idx.size):
            lam = max(best, 0.0)
            cb, Db = c[b], D[b]
            improved = None
            while True:
                score = cb[None, :] - lam * Db
                g = np.argmax(score, axis=1)
                F_val = score[np.arange(n), g].sum()
                if F_val <= _TOL * max(1.0, cb.max() * n):
                    break
                N = cb[g].sum()
                Dg = Db[np.arange(n), g].sum()
                new = N / Dg
                if new <= lam:
                    break
                lam, improved = new, g
            if improved is not None and lam > best:
                best, best_idx, best_g = lam, int(idx[b]), tuple(int(x) for x in improved)
    return best, best_idx, best_g


def _gamma_chunk(M: np.ndarray, Kmat: np.ndarray, lo: int, hi: int):
    n, k = M.shape[0], Kmat.shape[0]
    support = M > 0
    best, best_idx = -1.0, -1
    for start in range(lo, hi, 1024):
        idx = np.arange(start, min(hi, start + 1024), dtype=np.int64)
        F = _digits(idx, n, k)
        Kff = Kmat[F[:, :, None], F[:, None, :]]      # (B, n, n)
        N = Kff.sum(axis=(1, 2)) / n**2
        D = (Kff * M[None]).sum(axis=(1, 2)) / n
        pos_edges = ((Kff > 0) & support[None]).any(axis=(1, 2))
        inf_rows = np.flatnonzero(~pos_edges & (N > 0))
        if inf_rows.size:
            return INF, int(idx[inf_rows[0]])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(pos_edges, N / np.where(pos_edges, D, 1.0), -1.0)
        b = int(np.argmax(r))
        if r[b] > best:
            best, best_idx = float(r[b]), int(idx[b])
    return best, best_idx


def _ranges(nf: int):
    return [(lo, min(nf, lo + CHUNK)) for lo in range(0, nf, CHUNK)]


def _run(fn, M, Kmat, nf, workers: int):
    ranges = _ranges(nf)
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(fn, M, Kmat, lo, hi) for lo, hi in ranges]
            return [fu.result() for fu in futs]
    out = []
    for lo, hi in ranges:
        out.append(fn(M, Kmat, lo, hi))
        if out[-1][0] == INF:
            break
    return out


def _combine(results):
    """Largest value; ties go to the earliest chunk so the witness is schedule-free."""
    best = max(range(len(results)), key=lambda i: (results[i][0], -i))
    return results[best]


def gamma_plus_exact(A, K: KernelSpace, cap: int | None = None, workers: int = 1) -> PoincareEstimate:
    """Exact gamma_+ by enumerating f with an exact inner maximisation over g."""
    if K.size == 1:
        n = as_float_matrix(A).shape[0]
        return PoincareEstimate(1.0, "exact", (0,) * n, (0,) * n, ("one-point kernel: 1 by convention",))
    M, n, k, nf = _plan(A, K, cap, pairs=True)
    value, idx, g = _combine(_run(_plus_chunk, M, K.K, nf, workers))
    if idx < 0:
        return PoincareEstimate(1.0, "exact", None, None, ("every configuration is 0/0",))
    f = tuple(int(x) for x in _digits(np.array([idx]), n, k)[0])
    return PoincareEstimate(value, "exact", f, g)


def gamma_exact(A, K: KernelSpace, cap: int | None = None, workers: int = 1) -> PoincareEstimate:
    """Exact gamma (g = f) by enumeration."""
    if K.size == 1:
        n = as_float_matrix(A).shape[0]
        return PoincareEstimate(1.0, "exact", (0,) * n, None, ("one-point kernel: 1 by convention",))
    M, n, k, nf = _plan(A, K, cap, pairs=False)
    value, idx = _combine(_run(_gamma_chunk, M, K.K, nf, workers))
    if idx < 0:
        return PoincareEstimate(1.0, "exact", None, None, ("every configuration is 0/0",))
    f = tuple(int(x) for x in _digits(np.array([idx]), n, k)[0])
    return PoincareEstimate(value, "exact", f, None)


# -- local search ----------------------------------------------------------------

class _State:
    """f, g with running sums; zero tests use integer support counts."""

    def __init__(self, M, Kmat, f, g):
        self.M, self.K = M, Kmat
        self.S = M > 0
        self.f, self.g = f.copy(), g.copy()
        self.refresh()

    def refresh(self):
        Kfg = self.K[self.f][:, self.g]
        n = self.M.shape[0]
        self.N = Kfg.sum() / n**2
        self.D = (self.M * Kfg).sum() / n
        self.P = int(((Kfg > 0) & self.S).sum())
        self.Q = int((Kfg > 0).sum())

    def value(self):
        r = _ratio(self.N, self.D, self.P > 0, self.Q > 0)
        return -1.0 if r is None else r

    def candidates(self, v: int, side: str):
        """Ratio for every reassignment of f(v) (side 'f') or g(v) (side 'g')."""
        n = self.M.shape[0]
        other = self.g if side == "f" else self.f
        cur = (self.f if side == "f" else self.g)[v]
        Ko = self.K[:, other]                          # (k, n): K(x, other_j)
        w = self.M[v]                                  # symmetric, so row v works for both sides
        rowN = Ko.sum(axis=1) / n**2
        rowD = (Ko * w[None, :]).sum(axis=1) / n
        pos = Ko > 0
        rowP = (pos & (w > 0)[None, :]).sum(axis=1)
        rowQ = pos.sum(axis=1)
        N = self.N - rowN[cur] + rowN
        D = self.D - rowD[cur] + rowD
        P = self.P - rowP[cur] + rowP
        Q = self.Q - rowQ[cur] + rowQ
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(P > 0, N / np.where(P > 0, D, 1.0), np.where(Q > 0, INF, -1.0))
        return r


def _ascent(M, Kmat, f, g, max_sweeps: int = 200):
    st = _State(M, Kmat, f, g)
    n = M.shape[0]
    cur = st.value()
    for _ in range(max_sweeps):
        moved = False
        for side in ("f", "g"):
            arr = st.f if side == "f" else st.g
            for v in range(n):
                r = st.candidates(v, side)
                x = int(np.argmax(r))                  # first maximiser = smallest point id
                if r[x] > cur * (1 + 1e-13) + 1e-300 and x != arr[v]:
                    arr[v] = x
                    st.refresh()
                    cur = st.value()
                    moved = True
                    if cur == INF:
                        return st
        if not moved:
            break
    return st


def gamma_plus_search(A, K: KernelSpace, restarts: int = 10, seed: int = 0,
                      max_sweeps: int = 200) -> PoincareEstimate:
    """Lower bound on gamma_+ by coordinate ascent from random starts."""
    M = as_float_matrix(A)
    n, k = M.shape[0], K.size
    if k == 1:
        return PoincareEstimate(1.0, "lower_bound", (0,) * n, (0,) * n, ("one-point kernel",))
    best, bf, bg = -1.0, None, None
    for s in child_seeds(seed, restarts):
        rng = np.random.default_rng(s)
        f = rng.integers(0, k, n)
        g = rng.integers(0, k, n)
        st = _ascent(M, K.K, f, g, max_sweeps)
        val = evaluate(M, K, st.f, st.g)
        val = -1.0 if val is None else val
        if val > best:
            best, bf, bg = val, tuple(int(x) for x in st.f), tuple(int(x) for x in st.g)
        if best == INF:
            break
    if best < 0:
        return PoincareEstimate(1.0, "lower_bound", None, None, ("no configuration with positive pair sum",))
    return PoincareEstimate(best, "lower_bound", bf, bg)


# -- Frechet embedding bounds ----------------------------------------------------

def shortest_paths(G: Multigraph) -> np.ndarray:
    D = csgraph.shortest_path(G.sparse_adjacency(), directed=False, unweighted=True)
    if np.isinf(D).any():
        raise Disconnected("graph is disconnected")
    return D.astype(np.int64)


def frechet_embedding(G: Multigraph) -> np.ndarray:
    """v -> (d_G(v, u))_u, an isometry into l_inf with integer coordinates."""
    return shortest_paths(G)


def frechet_lower_bound(G: Multigraph, p: float, hist: np.ndarray | None = None) -> PoincareEstimate:
    """Ratio at f = g = Frechet embedding under (log(1 + ||.||_inf))**p.

    The embedding is isometric, so ||f(u) - f(v)||_inf = d_G(u, v): the pair sum
    only needs the distance histogram, and every non-loop edge has length 1.
    """
    hist = distance_histogram(G) if hist is None else hist
    n = G.n
    num = float((hist * log_linf_transform(np.arange(hist.size), p)).sum()) / n**2
    den = math.log(2.0) ** p * (1.0 - G.loop_count() / (n * G.d))
    value = INF if den == 0 and num > 0 else (1.0 if den == 0 else num / den)
    return PoincareEstimate(float(value), "lower_bound", tuple(range(n)), tuple(range(n)),
                            ("f = g = Frechet embedding",))


def distance_histogram(G: Multigraph, block: int = 256) -> np.ndarray:
    """counts[r] = number of ordered pairs at graph distance r."""
    S = G.sparse_adjacency()
    counts = np.zeros(G.n, dtype=np.int64)
    for lo in range(0, G.n, block):
        D = csgraph.shortest_path(S, directed=False, unweighted=True, indices=np.arange(lo, min(G.n, lo + block)))
        if np.isinf(D).any():
            raise Disconnected("graph is disconnected")
        counts += np.bincount(D.astype(np.int64).ravel(), minlength=G.n)[: G.n]
    return np.trim_zeros(counts, "b")


def walk_return_traces(G: Multigraph, tmax: int) -> np.ndarray:
    """tr(A^t) for t = 0..tmax (sparse times dense products)."""
    S = G.sparse_adjacency()
    P = np.eye(G.n)
    out = [float(G.n)]
    for _ in range(tmax):
        P = S @ P
        out.append(float(np.trace(P)))
    return np.array(out)


def cesaro_frechet_lower_bound(G: Multigraph, m: int, p: float, hist: np.ndarray | None = None,
                               traces: np.ndarray | None = None) -> PoincareEstimate:
    """frechet_lower_bound(cesaro(G, m), p) without building the Cesaro graph.

    For m >= 2 the Cesaro graph joins u != v exactly when d_G(u, v) <= m - 1, so
    its path metric is ceil(d_G / (m - 1)).  Its edges have length 0 or 1, and the
    edge sum is T(1)**p times the off-diagonal mass 1 - tr(B)/n.
    """
    if m < 2:
        raise Disconnected("the Cesaro graph with m = 1 has only loops")
    hist = distance_histogram(G) if hist is None else hist
    traces = walk_return_traces(G, m - 1) if traces is None else traces
    n = G.n
    r = np.arange(hist.size)
    dist_b = -(-r // (m - 1))
    num = float((hist * log_linf_transform(dist_b, p)).sum()) / n**2
    offdiag = 1.0 - traces[:m].sum() / m / n
    den = math.log(2.0) ** p * offdiag
    value = INF if den <= 0 and num > 0 else (1.0 if den <= 0 else num / den)
    return PoincareEstimate(value, "lower_bound", None, None, (f"Frechet embedding of the m={m} Cesaro graph",))


# -- coarse obstruction ----------------------------------------------------------

@dataclass(frozen=True)
class ObstructionReport:
    n: int
    half_distance: int      # largest r with at least half of ordered pairs at distance >= r
    c: float                # half_distance / log n
    gamma_plus: float
    p: float
    distortion_lower_bound: float


def coarse_obstruction_report(G: Multigraph, gamma_plus: float, p: float,
                              hist: np.ndarray | None = None) -> ObstructionReport:
    """Distortion lower bound from the Poincare inequality.

    If at least half of the n^2 ordered pairs are r apart, a D-distortion
    embedding that is 1-Lipschitz on edges gives (1/2)(r/D)^p <= gamma, so
    D >= r / (2 gamma)^(1/p).
    """
    if gamma_plus == INF:
        raise ValueError("gamma_plus must be finite")
    hist = distance_histogram(G) if hist is None else hist
    n2 = G.n**2
    at_least = np.cumsum(hist[::-1])[::-1]           # pairs with distance >= r
    r = int(np.flatnonzero(2 * at_least >= n2).max())
    bound = max(1.0, r / (2.0 * gamma_plus) ** (1.0 / p))
    c = r / math.log(G.n) if G.n > 1 else 0.0
    return ObstructionReport(G.n, r, c, gamma_plus, p, bound)
