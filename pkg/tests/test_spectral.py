import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlsg.linalg import eigh, lanczos_extremes, tridiagonal_eigh
from nlsg.multigraph import complete, cycle, from_edge_list, random_regular, single_loop
from nlsg.rng import child_seeds
from nlsg.spectral import (
    CSV_HEADER, DECAY_BAND, csv_row, decay_band_sweep, euclidean_decay_check, extremes, random_stochastic,
    spectrum, support_structure,
)


@pytest.mark.parametrize("n", [2, 3, 7, 50, 130])
def test_eigh_against_lapack(n):
    rng = np.random.default_rng(n)
    A = rng.standard_normal((n, n))
    A = A + A.T
    w, V = eigh(A)
    assert np.allclose(w, np.linalg.eigvalsh(A), atol=1e-10)
    assert np.abs(A @ V - V * w).max() < 1e-10
    assert np.allclose(V.T @ V, np.eye(n), atol=1e-10)
    w2, _ = eigh(A, vectors=False)
    assert np.allclose(w2, w, atol=1e-12)


def test_eigh_degenerate_inputs():
    assert np.array_equal(eigh(np.zeros((4, 4)))[0], np.zeros(4))
    w, V = eigh(np.eye(3))
    assert np.allclose(w, 1) and np.allclose(V.T @ V, np.eye(3))
    w, _ = eigh(np.array([[2.5]]))
    assert w[0] == 2.5


def test_tridiagonal():
    w, S = tridiagonal_eigh(np.zeros(5), np.ones(4))
    assert np.allclose(w, 2 * np.cos(np.pi * np.arange(5, 0, -1) / 6))
    T = np.diag(np.ones(4), 1) + np.diag(np.ones(4), -1)
    assert np.abs(T @ S - S * w).max() < 1e-12


def test_lanczos_matches_dense():
    G = random_regular(400, 4, 2)
    M = G.sparse_adjacency()
    lo, hi, rlo, rhi = lanczos_extremes(lambda x: M @ x, G.n, np.ones(G.n))
    w = np.linalg.eigvalsh(M.toarray())
    assert lo == pytest.approx(w[0], abs=1e-10)
    assert hi == pytest.approx(w[-2], abs=1e-10)
    assert max(rlo, rhi) < 1e-10


def test_triangle():
    rep = spectrum(complete(3))
    assert np.allclose(rep.eigenvalues, [-0.5, -0.5, 1.0])
    assert rep.eigenvalues[-1] == 1.0
    assert rep.lambda_abs == pytest.approx(0.5)
    assert rep.gamma_plus == pytest.approx(2.0)


def test_double_edge_infinite():
    rep = spectrum(from_edge_list(2, [(0, 1), (0, 1)]))
    assert rep.lambda_abs == 1.0
    assert rep.gamma_plus == math.inf
    assert rep.eigenvalues[0] == -1.0


def test_disconnected_gamma_infinite():
    rep = spectrum(from_edge_list(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]))
    assert rep.lambda2 == 1.0 and rep.gamma == math.inf and rep.gamma_plus == math.inf


def test_single_vertex_convention():
    rep = spectrum(single_loop())
    assert rep.gamma == 1.0 and rep.gamma_plus == 1.0


def test_support_structure():
    assert support_structure(cycle(6)) == (1, 1)
    assert support_structure(cycle(5)) == (1, 0)
    two = from_edge_list(7, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 4)])
    assert support_structure(two) == (2, 1)


def rayleigh_ascent(A: np.ndarray, seed: int, starts: int = 20, iters: int = 2000) -> float:
    """max |x'Ax|/x'x over x orthogonal to constants, by power-type ascent."""
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    best = 0.0
    P = np.eye(n) - 1.0 / n
    for sign in (1.0, -1.0):
        shift = sign * A + np.eye(n)  # non-negative spectrum, same top eigenvector
        for _ in range(starts):
            x = P @ rng.standard_normal(n)
            for _ in range(iters):
                x = P @ (shift @ x)
                x /= np.linalg.norm(x)
            best = max(best, abs(x @ A @ x))
    return best


def test_random_regular_matches_rayleigh_oracle():
    G = random_regular(64, 4, 17)
    rep = spectrum(G)
    assert rep.gamma_plus < math.inf
    lam = rayleigh_ascent(G.normalized_adjacency().dense(), 3)
    assert 1 / (1 - lam) == pytest.approx(rep.gamma_plus, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 60), st.integers(1, 6), st.integers(0, 2**32))
def test_report_invariants(n, d, seed):
    rep = spectrum(random_regular(n, d, seed))
    ev = rep.eigenvalues
    assert ev[-1] == 1.0 and np.all(np.diff(ev) >= 0) and ev[0] >= -1.0
    assert rep.gamma <= rep.gamma_plus
    assert (rep.gamma_plus == math.inf) == (rep.lambda_abs == 1.0)


def test_extremes_large_graph():
    G = random_regular(5000, 4, 1)
    rep = spectrum(G)
    assert not rep.complete
    assert 0.8 < rep.lambda2 < 0.9 and -0.9 < rep.lambda_min < -0.8
    assert extremes(cycle(6)).gamma_plus == math.inf


def test_euclidean_decay():
    A = random_regular(40, 3, 5).normalized_adjacency()
    rep = spectrum(A)
    r1 = euclidean_decay_check(A, 1)
    assert r1.in_band
    assert r1.gamma_plus_power == pytest.approx(rep.gamma_plus)
    for t in (2, 5, 16, 64):
        r = euclidean_decay_check(A, t)
        assert r.in_band
        assert spectrum(A.power(t)).lambda_abs == pytest.approx(rep.lambda_abs ** t, abs=1e-10)


def test_decay_band_holds_on_fresh_sweep():
    lo, hi = decay_band_sweep(seed=99, instances=60)
    assert DECAY_BAND[0] <= lo and hi <= DECAY_BAND[1]
    for s in child_seeds(5, 10):
        A = random_stochastic(int(s % 100) + 3, s)
        if spectrum(A).gamma_plus < math.inf:
            assert euclidean_decay_check(A, int(s % 64) + 1).in_band


def test_csv_row():
    line = csv_row("c6", cycle(6))
    assert CSV_HEADER.count(",") == line.count(",")
    fields = line.strip().split(",")
    assert fields[:3] == ["c6", "6", "2"] and fields[-1] == "inf"
