"""Base graphs from the noisy hypercube.

Pipeline: the heat kernel on F_2^n as a translation-invariant weight table,
truncated to low-weight generators and rounded to parallel edges, giving an
unweighted Cayley multigraph; then the quotient by the dual of a good code.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import codes
from .errors import EmptyTruncation, NotCayley
from .hypercube import heat, iwht, noise_rate, popcounts, wht
from .multigraph import Multigraph, as_float_matrix, from_counts
from .poincare import gamma_plus_search, kernel_metric_power, real_line_kernel, uniform_kernel
from .rng import child_seed, generator
from .spectral import spectrum

MAX_CUBE_DIM = 20
MAX_BASE_DIM = 14
DEFAULT_T = 0.1
SANDWICH_BAND = (1 / 3, 3.0)


@dataclass(frozen=True)
class TruncationSpec:
    n: int
    t: float
    p: float = 2.0

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if not 1 <= self.n <= MAX_CUBE_DIM:
            raise ValueError(f"n must lie in 1..{MAX_CUBE_DIM}")

    @property
    def tau(self) -> float:
        return float(noise_rate(self.t))

    @property
    def weight_cutoff(self) -> float:
        return 4 * self.tau * self.n

    @property
    def max_weight(self) -> int:
        # guard against 4*tau*n landing a hair below an integer
        return int(math.floor(self.weight_cutoff + 1e-12))

    @property
    def quantum(self) -> float:
        """Heat weight of one generator of the largest surviving Hamming weight."""
        w, tau = self.max_weight, self.tau
        return tau**w * (1 - tau) ** (self.n - w)

    @property
    def feasible(self) -> bool:
        """Whether 18 tau^2 n >= 2 p log n + log 4 holds."""
        return 18 * self.tau**2 * self.n >= 2 * self.p * math.log(self.n) + math.log(4)

    @property
    def degree_bound(self) -> float:
        """tau^{-4 tau n} (1 - tau)^{-(1 - 4 tau) n}."""
        tau, n = self.tau, self.n
        if tau == 0:
            return 1.0
        return math.exp(-4 * tau * n * math.log(tau) - (1 - 4 * tau) * n * math.log1p(-tau))


def heat_weights(n: int, t: float) -> np.ndarray:
    """w(z) = tau^{|z|} (1 - tau)^{n - |z|}, the heat kernel between x and x + z."""
    tau = noise_rate(t)
    k = popcounts(n)
    return tau**k * (1 - tau) ** (n - k)


@dataclass
class Truncation:
    spec: TruncationSpec
    generators: np.ndarray      # distinct generators z (integers)
    multiplicity: np.ndarray    # parallel copies of each generator
    warnings: list[str] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return int(self.multiplicity.sum())

    def port_generators(self) -> np.ndarray:
        """Generator used by every port, in port order."""
        return np.repeat(self.generators, self.multiplicity)

    def graph(self) -> Multigraph:
        """Cayley multigraph: port (z, copy) at x leads to x + z, same port; z = 0 gives loops."""
        z = self.port_generators()
        x = np.arange(1 << self.spec.n, dtype=np.int64)
        nbr = x[:, None] ^ z[None, :]
        port = np.broadcast_to(np.arange(z.size, dtype=np.int64), nbr.shape)
        return Multigraph(nbr, port)


def truncate(spec: TruncationSpec) -> Truncation:
    """Keep generators of weight <= 4 tau n; copies = round-half-up(w(z) / quantum)."""
    n, tau, top = spec.n, spec.tau, spec.max_weight
    warnings = []
    if not spec.feasible:
        warnings.append(f"18 tau^2 n >= 2 p log n + log 4 fails (n={n}, t={spec.t}, p={spec.p})")
    k = popcounts(n)
    gens = np.flatnonzero(k <= top)
    if tau == 0:
        ratio = np.where(k[gens] == 0, 1.0, 0.0)
    else:
        ratio = np.exp((top - k[gens]) * (math.log1p(-tau) - math.log(tau)))
    mult = np.floor(ratio + 0.5).astype(np.int64)
    keep = mult > 0
    gens, mult = gens[keep], mult[keep]
    if mult.sum() == 0:
        raise EmptyTruncation(f"no generator survives truncation (n={n}, t={spec.t})")
    return Truncation(spec, gens, mult, warnings)


# -- sandwich between the heat kernel and the truncated graph ---------------------

def heat_form(f: np.ndarray, g: np.ndarray, t: float, p: float, direct: bool = False) -> float:
    """2^{-n} sum_{x,y} (T_t)_{xy} d(f(x), g(y))^p."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    n = int(f.shape[0]).bit_length() - 1
    if p == 2 and not direct:
        # T_t is symmetric with unit row sums, so the form expands through <f, T_t g>
        return float((f * f).sum() + (g * g).sum() - 2 * (f * heat(g, t, "spatial")).sum()) / (1 << n)
    w = heat_weights(n, t)
    return _heat_sum(f.reshape(f.shape[0], -1), g.reshape(g.shape[0], -1), w, float(p)) / (1 << n)


@njit(cache=True)
def _heat_sum(f, g, w, p):
    size, k = f.shape
    total = 0.0
    for x in range(size):
        for y in range(size):
            s = 0.0
            for c in range(k):
                d = f[x, c] - g[y, c]
                s += d * d
            if p == 2.0:
                total += w[x ^ y] * s
            elif p == 1.0:
                total += w[x ^ y] * np.sqrt(s)
            else:
                total += w[x ^ y] * s ** (p / 2)
    return total


def graph_form(f: np.ndarray, g: np.ndarray, T: Truncation, p: float) -> float:
    """|E|^{-1} sum over ordered edges (x, y) of d(f(x), g(y))^p."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    x = np.arange(f.shape[0])
    idx = x[:, None] ^ T.generators[None, :]
    fx = f[:, None] if f.ndim == 1 else f[:, None, :]
    per_gen = _distance_p(fx, g[idx], p).sum(axis=0)
    return float(per_gen @ T.multiplicity) / (f.shape[0] * T.degree)


def _distance_p(a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    if b.ndim == 3:
        return np.sqrt(((a - b) ** 2).sum(axis=-1)) ** p
    return np.abs(a - b) ** p


def _random_pair(rng: np.random.Generator, n: int, trial: int) -> tuple[np.ndarray, np.ndarray]:
    """Mix of independent Gaussian, equal smooth and Walsh-type pairs."""
    size = 1 << n
    kind = trial % 4
    if kind == 0:
        return rng.standard_normal(size), rng.standard_normal(size)
    if kind == 1:
        f = rng.standard_normal((size, 3))
        return f, f
    if kind == 2:
        c = rng.standard_normal(size) * np.exp(-popcounts(n) * rng.uniform(0, 2))
        f = iwht(c)
        return f, f + 0.1 * rng.standard_normal(size)
    A = int(rng.integers(1, size))
    sign = 1.0 - 2.0 * (np.bitwise_count(np.arange(size) & A) & 1)
    return sign, sign * rng.choice([1.0, -1.0])


def sandwich_ratios(T: Truncation, trials: int = 100, seed: int = 0, p: float | None = None) -> np.ndarray:
    """heat_form / graph_form over randomized (f, g); every ratio should lie in SANDWICH_BAND."""
    p = T.spec.p if p is None else p
    rng = generator(seed)
    out = np.empty(trials)
    for i in range(trials):
        f, g = _random_pair(rng, T.spec.n, i)
        h, e = heat_form(f, g, T.spec.t, p), graph_form(f, g, T, p)
        out[i] = 1.0 if h == e == 0 else (np.inf if e == 0 else h / e)
    return out


# -- quotient by a subspace -------------------------------------------------------

def quotient(G: Multigraph, C_perp: codes.BinaryCode) -> Multigraph:
    """Identify each coset x + C_perp; edge counts between cosets divide by |C_perp|."""
    if G.n != 1 << C_perp.n:
        raise ValueError(f"graph has {G.n} vertices, expected 2^{C_perp.n}")
    cl = codes.cosets(C_perp)
    N = cl.count
    src = np.repeat(cl.label, G.d)
    dst = cl.label[G.nbr.ravel()]
    counts = np.bincount(src * N + dst, minlength=N * N).reshape(N, N)
    size = cl.size
    if np.any(counts % size):
        raise NotCayley("inter-coset edge counts are not divisible by the subgroup size")
    return from_counts(counts // size)


def coset_constant(C_perp: codes.BinaryCode, values: np.ndarray) -> np.ndarray:
    """Lift one value per coset to the whole cube."""
    return np.asarray(values)[codes.cosets(C_perp).label]


def kn_tail_residual(C: codes.BinaryCode, seed: int = 0, k: int = 2) -> float:
    """Largest |fhat(A)| over nonempty |A| < distance(C) for a random coset-constant f."""
    C_perp = codes.dual(C)
    m = codes.min_distance(C)
    cl = codes.cosets(C_perp)
    f = generator(seed).standard_normal((cl.count, k))[cl.label]
    w = popcounts(C.n)
    mask = (w > 0) & (w < m)
    if not mask.any():
        return 0.0
    return float(np.abs(wht(f)[mask]).max())


def quadratic_form(A, f: np.ndarray) -> float:
    """(1/N) sum_{ij} A_ij |f(i) - f(j)|^2."""
    M = as_float_matrix(A) if not isinstance(A, Multigraph) else A.sparse_adjacency().toarray()
    f = np.asarray(f, dtype=float).reshape(M.shape[0], -1)
    D = ((f[:, None, :] - f[None, :, :]) ** 2).sum(axis=2)
    return float((M * D).sum()) / M.shape[0]


# -- norm bound to Poincare constant ------------------------------------------------

@dataclass(frozen=True)
class NormBound:
    p: float
    lam: float
    bound: float
    exact: bool  # False: lam is an ascent lower estimate (p != 2)


def _lp_ratio(M: np.ndarray, f: np.ndarray, p: float) -> float:
    den = float(np.sum(np.abs(f) ** p))
    return 0.0 if den == 0 else (float(np.sum(np.abs(M @ f) ** p)) / den) ** (1 / p)


def norm_bound(A, p: float = 2.0, restarts: int = 8, seed: int = 0) -> NormBound:
    """lam with ||A f||_p <= lam ||f||_p on mean-zero f, and the bound 8^p (1 - lam)^{-p}."""
    if p == 2:
        lam, exact = spectrum(A).lambda_abs, True
    else:
        from scipy.optimize import minimize

        M = as_float_matrix(A) if not isinstance(A, Multigraph) else A.sparse_adjacency().toarray()
        N = M.shape[0]
        if N == 1:
            lam = 0.0
        else:
            vals, vecs = np.linalg.eigh(M)
            starts = [vecs[:, 0], vecs[:, -2]]
            rng = generator(seed)
            starts += [rng.standard_normal(N) for _ in range(restarts)]

            def neg(u):
                return -_lp_ratio(M, u - u.mean(), p)

            lam = 0.0
            for u0 in starts:
                res = minimize(neg, u0 - u0.mean(), method="Nelder-Mead" if N <= 8 else "Powell",
                               options={"maxiter": 4000, "xatol": 1e-10, "fatol": 1e-12})
                lam = max(lam, -float(res.fun), -neg(u0))
            lam = min(lam, 1.0)
        exact = False
    bound = math.inf if lam >= 1 else 8**p * (1 - lam) ** (-p)
    return NormBound(p, float(lam), bound, exact)


# -- full pipeline ----------------------------------------------------------------

def search_kernels(p: float = 2.0) -> dict:
    """Small l_p-type target spaces used for the gamma_+ lower bounds."""
    square = np.array([[abs(a - c) + abs(b - d) for c in (0, 1) for d in (0, 1)] for a in (0, 1) for b in (0, 1)])
    return {
        "two_point": uniform_kernel(2, p),
        "line3": real_line_kernel([0.0, 1.0, 3.0], p),
        "l1_square": kernel_metric_power(square, p, label="l1_square"),
    }


@dataclass
class BaseReport:
    n: int
    seed: int
    t: float
    tau: float
    code_dim: int
    dual_dim: int
    distance: float
    vertices: int
    degree: int
    pre_quotient_degree: int
    degree_bound: float
    feasible: bool
    lam: float
    gamma_plus_spectral: float
    gamma_plus_search: dict
    sandwich_min: float
    sandwich_max: float
    kn_tail_residual: float
    warnings: list = field(default_factory=list)

    def text(self) -> str:
        lines = [
            f"base graph n={self.n} seed={self.seed} t={self.t:g} tau={self.tau:.6g}",
            f"  code: dim {self.code_dim}, distance {self.distance}; dual dim {self.dual_dim}",
            f"  truncated Cayley degree {self.pre_quotient_degree} (bound {self.degree_bound:.6g}), "
            f"feasible={self.feasible}",
            f"  quotient: {self.vertices} vertices, degree {self.degree}",
            f"  lambda {self.lam:.12g}, spectral gamma_+ {self.gamma_plus_spectral:.12g}",
            f"  sandwich ratios in [{self.sandwich_min:.6g}, {self.sandwich_max:.6g}]",
            f"  Fourier tail residual {self.kn_tail_residual:.3g}",
        ]
        lines += [f"  gamma_+ search >= {v:.12g} ({k})" for k, v in self.gamma_plus_search.items()]
        lines += [f"  warning: {w}" for w in self.warnings]
        return "\n".join(lines) + "\n"

    def csv_row(self) -> dict:
        row = {
            "n": self.n, "seed": self.seed, "code_dim": self.code_dim, "dual_dim": self.dual_dim,
            "m": self.distance, "t": self.t, "tau": self.tau, "degree": self.degree,
            "degree_bound": self.degree_bound, "vertices": self.vertices, "lambda": self.lam,
            "gamma_plus_spectral": self.gamma_plus_spectral,
        }
        row.update({f"gamma_plus_search_{k}": v for k, v in self.gamma_plus_search.items()})
        row.update({"sandwich_min": self.sandwich_min, "sandwich_max": self.sandwich_max,
                    "feasible": self.feasible})
        return row


def reports_csv(reports: list[BaseReport]) -> str:
    buf = io.StringIO()
    rows = [r.csv_row() for r in reports]
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def build_base(n: int, t: float = DEFAULT_T, seed: int = 0, p: float = 2.0, trials: int = 100,
               restarts: int = 10) -> tuple[Multigraph, BaseReport]:
    """good code -> heat truncation -> quotient, with a certification report."""
    if not 1 <= n <= MAX_BASE_DIM:
        raise ValueError(f"n must lie in 1..{MAX_BASE_DIM}")
    C = codes.good_code(n, child_seed(seed, 0))
    C_perp = codes.dual(C)
    spec = TruncationSpec(n, t, p)
    T = truncate(spec)
    G = T.graph()
    ratios = sandwich_ratios(T, trials, child_seed(seed, 1), p)
    H = quotient(G, C_perp)
    rep = spectrum(H)
    search = {
        label: gamma_plus_search(H.normalized_adjacency(), K, restarts, child_seed(seed, 2)).value
        for label, K in search_kernels(p).items()
    }
    report = BaseReport(
        n=n, seed=seed, t=t, tau=spec.tau, code_dim=C.k, dual_dim=C_perp.k, distance=codes.min_distance(C),
        vertices=H.n, degree=H.d, pre_quotient_degree=G.d, degree_bound=spec.degree_bound,
        feasible=spec.feasible, lam=rep.lambda_abs, gamma_plus_spectral=rep.gamma_plus,
        gamma_plus_search=search, sandwich_min=float(ratios.min()), sandwich_max=float(ratios.max()),
        kn_tail_residual=kn_tail_residual(C, child_seed(seed, 3)), warnings=list(T.warnings),
    )
    return H, report
