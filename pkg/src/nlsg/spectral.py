"""Euclidean spectral gaps of symmetric doubly-stochastic matrices.

Eigenvalues are computed in floating point by the in-repo solver; the
eigenvalues +1 and -1 are placed exactly from the support graph (one +1 per
connected component, one -1 per bipartite component) so that gamma and
gamma_plus are infinite exactly when they should be.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .linalg import eigh, lanczos_extremes
from .multigraph import Multigraph, StochasticMatrix, as_float_matrix
from .rng import child_seeds

INF = math.inf
DENSE_LIMIT = 4096
RESIDUAL_TOL = 1e-10

# Band for gamma_plus(A^t) / max{1, gamma_plus(A)/t}, frozen from
# `decay_band_sweep(seed=20240601)` (observed min and max, widened by 10%).
DECAY_BAND_SEED = 20240601
DECAY_BAND = (0.9, 1.7139996675589253)


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray  # ascending; only the two extremes when complete=False
    lambda2: float
    lambda_abs: float
    gamma: float
    gamma_plus: float
    complete: bool = True

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])


def _reciprocal_gap(lam: float) -> float:
    return INF if lam >= 1.0 else float(1.0 / (1.0 - lam))


def _support(A) -> sp.csr_matrix:
    if isinstance(A, Multigraph):
        return A.sparse_adjacency()
    if isinstance(A, StochasticMatrix):
        return sp.csr_matrix(np.asarray(A.num != 0, dtype=np.int8))
    if sp.issparse(A):
        return sp.csr_matrix(A != 0)
    return sp.csr_matrix(np.asarray(A) != 0)


def support_structure(A) -> tuple[int, int]:
    """(number of components, number of bipartite components) of the support graph."""
    S = _support(A)
    ncomp, labels = csgraph.connected_components(S, directed=False)
    roots = np.unique(labels, return_index=True)[1]
    depth = csgraph.dijkstra(S, directed=False, indices=roots, unweighted=True, min_only=True)
    depth = depth.astype(np.int64)
    C = S.tocoo()
    clash = (depth[C.row] - depth[C.col]) % 2 == 0
    odd = np.zeros(ncomp, dtype=bool)
    odd[labels[C.row[clash]]] = True
    return ncomp, int(np.count_nonzero(~odd))


def _operator(A):
    if isinstance(A, Multigraph):
        M = A.sparse_adjacency()
    elif isinstance(A, StochasticMatrix):
        M = sp.csr_matrix(A.dense())
    else:
        M = sp.csr_matrix(np.asarray(A, dtype=float))
    return M


def _report(eigs: np.ndarray, ncomp: int, nbip: int, complete: bool) -> SpectralReport:
    eigs = np.clip(np.sort(eigs), -1.0, 1.0)
    n = eigs.shape[0]
    if complete:
        eigs[n - ncomp:] = 1.0
        if nbip:
            eigs[:nbip] = -1.0
        inner = eigs[nbip:n - ncomp]
        inner[inner >= 1.0] = np.nextafter(1.0, 0.0)
        inner[inner <= -1.0] = np.nextafter(-1.0, 0.0)
    if n == 1:
        return SpectralReport(np.array([1.0]), 0.0, 0.0, 1.0, 1.0, complete)
    lam2 = float(eigs[-2])
    lam_abs = max(abs(lam2), abs(float(eigs[0])))
    return SpectralReport(eigs, lam2, lam_abs, _reciprocal_gap(lam2), _reciprocal_gap(lam_abs), complete)


def spectrum(A, dense_limit: int = DENSE_LIMIT, seed: int = 0) -> SpectralReport:
    """Spectral report of a symmetric doubly-stochastic matrix or of a regular graph.

    Up to ``dense_limit`` vertices the full spectrum is computed; above it only
    lambda_2 and lambda_n are obtained by deflated Lanczos and the report is
    marked incomplete.
    """
    if isinstance(A, Multigraph):
        n = A.n
    elif isinstance(A, StochasticMatrix):
        n = A.n
    else:
        n = np.asarray(A).shape[0]
    ncomp, nbip = support_structure(A)
    if n <= dense_limit:
        M = A.normalized_adjacency().dense() if isinstance(A, Multigraph) else as_float_matrix(A)
        w, _ = eigh(M, vectors=False)
        return _report(w, ncomp, nbip, True)
    return extremes(A, seed=seed, _structure=(ncomp, nbip))


def extremes(A, seed: int = 0, _structure=None) -> SpectralReport:
    """lambda_2 and lambda_n only, via Lanczos on the complement of the constants."""
    M = _operator(A)
    n = M.shape[0]
    ncomp, nbip = _structure or support_structure(A)
    if n <= 2:
        return spectrum(A)
    lo, hi, rlo, rhi = lanczos_extremes(lambda x: M @ x, n, np.ones(n), steps=min(n - 1, 1000),
                                        seed=seed, tol=RESIDUAL_TOL)
    if max(rlo, rhi) > RESIDUAL_TOL:
        raise ArithmeticError(f"Lanczos residual {max(rlo, rhi):.3g} above tolerance")
    lo = -1.0 if nbip else max(float(lo), np.nextafter(-1.0, 0.0))
    hi = 1.0 if ncomp > 1 else min(float(hi), np.nextafter(1.0, 0.0))
    eigs = np.array([lo, hi, 1.0])
    lam_abs = max(abs(lo), abs(hi))
    return SpectralReport(eigs, float(hi), float(lam_abs), _reciprocal_gap(hi), _reciprocal_gap(lam_abs), False)


@dataclass(frozen=True)
class DecayReport:
    t: int
    gamma_plus_power: float
    predicted: float
    ratio: float
    in_band: bool


def euclidean_decay_check(A, t: int, band: tuple[float, float] = DECAY_BAND) -> DecayReport:
    """Compare gamma_plus(A^t) with max{1, gamma_plus(A)/t}.

    lambda(A^t) = lambda(A)^t, so the powered gap comes from one spectrum.
    """
    if t < 1:
        raise ValueError("t must be positive")
    rep = spectrum(A)
    if rep.gamma_plus == INF:
        raise ValueError("gamma_plus(A) is infinite")
    gp_t = _reciprocal_gap(rep.lambda_abs ** t)
    pred = max(1.0, rep.gamma_plus / t)
    ratio = gp_t / pred
    return DecayReport(t, gp_t, pred, ratio, band[0] <= ratio <= band[1])


def random_stochastic(n: int, seed: int) -> StochasticMatrix:
    """Normalized adjacency of a random regular multigraph of random degree 3..8."""
    from .multigraph import random_regular
    rng = np.random.default_rng(seed)
    d = int(rng.integers(3, 9))
    return random_regular(n, d, int(rng.integers(1 << 62))).normalized_adjacency()


def decay_band_sweep(seed: int = DECAY_BAND_SEED, instances: int = 300,
                     max_n: int = 128, max_t: int = 64) -> tuple[float, float]:
    """Observed (min, max) of the decay ratio over random connected non-bipartite A."""
    lo, hi = INF, 0.0
    for s in child_seeds(seed, instances):
        rng = np.random.default_rng(s)
        n = int(rng.integers(2, max_n + 1))
        A = random_stochastic(n, int(rng.integers(1 << 62)))
        rep = spectrum(A)
        if rep.gamma_plus == INF:
            continue
        for t in range(1, max_t + 1):
            r = _reciprocal_gap(rep.lambda_abs ** t) / max(1.0, rep.gamma_plus / t)
            lo, hi = min(lo, r), max(hi, r)
    return lo, hi


def csv_row(graph_id: str, A, rep: SpectralReport | None = None) -> str:
    """One CSV line: graph id, n, d, lambda_2, lambda, gamma, gamma_plus."""
    rep = rep or spectrum(A)
    if isinstance(A, Multigraph):
        n, d = A.n, A.d
    else:
        n, d = (A.n if isinstance(A, StochasticMatrix) else np.asarray(A).shape[0]), ""
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(
        [graph_id, n, d, repr(rep.lambda2), repr(rep.lambda_abs), fmt_value(rep.gamma), fmt_value(rep.gamma_plus)])
    return buf.getvalue()


def fmt_value(x: float) -> str:
    return "inf" if x == INF else repr(float(x))


CSV_HEADER = "graph_id,n,d,lambda2,lambda,gamma,gamma_plus\n"
