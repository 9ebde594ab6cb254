import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlsg.errors import Disconnected, EnumerationTooLarge, TriangleViolation
from nlsg.graph_ops import cesaro, cesaro_matrix, cycle_with_loops, double, edge_complete
from nlsg.multigraph import StochasticMatrix, cycle, from_edge_list, random_regular
from nlsg.poincare import (
    KernelSpace, cesaro_frechet_lower_bound, coarse_obstruction_report, distance_histogram, evaluate,
    evaluate_exact, frechet_embedding, frechet_lower_bound, gamma_exact, gamma_plus_exact, gamma_plus_search,
    kernel_log_linf, kernel_metric_power, real_line_kernel, uniform_kernel,
)
from nlsg.spectral import spectrum

K2 = uniform_kernel(2)
DOUBLE_EDGE = from_edge_list(2, [(0, 1), (0, 1)])


def brute_force(A, K, plus=True):
    """Every (f, g) in rational arithmetic; written independently of the engine."""
    n = A.n if isinstance(A, StochasticMatrix) else len(A)
    best = None
    for f in itertools.product(range(K.size), repeat=n):
        for g in (itertools.product(range(K.size), repeat=n) if plus else [f]):
            r = evaluate_exact(A, K, f, g)
            if r is not None and (best is None or r > best):
                best = r
    return best


def test_metric_power_examples():
    assert np.array_equal(kernel_metric_power([[0, 1], [1, 0]], 2).K, [[0, 1], [1, 0]])
    path = kernel_metric_power([[0, 1, 2], [1, 0, 1], [2, 1, 0]], 2)
    assert path.K[0, 2] == 4
    cube = np.array([[abs(a - c) + abs(b - d) for c in (0, 1) for d in (0, 1)] for a in (0, 1) for b in (0, 1)])
    assert kernel_metric_power(cube, 2).K.max() == 4


def test_triangle_violation_names_triple():
    d = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(TriangleViolation) as exc:
        kernel_metric_power(d, 1)
    assert exc.value.triple == (0, 1, 2)
    assert kernel_metric_power(d, 1, check=False).K[0, 2] == 5


def test_log_linf_kernel():
    K = kernel_log_linf([[0, 0], [0, 0], [1, 0], [2, 1]], 2)
    assert K.K[0, 1] == 0
    assert K.K[0, 2] == pytest.approx(math.log(2) ** 2)
    K1 = kernel_log_linf([[0], [2]], 1)
    assert K1.K[0, 1] == pytest.approx(math.log(3))


def test_bipartite_obstruction_is_infinite():
    A = DOUBLE_EDGE.normalized_adjacency()
    est = gamma_plus_exact(A, K2)
    assert est.value == math.inf and est.kind == "exact"
    assert evaluate_exact(A, K2, est.f, est.g) == math.inf


def test_one_point_kernel_convention():
    K1 = KernelSpace(np.zeros((1, 1)))
    assert gamma_plus_exact(cycle(3).normalized_adjacency(), K1).value == 1
    assert gamma_exact(cycle(3).normalized_adjacency(), K1).value == 1


def test_identity_gamma_infinite():
    assert gamma_exact(StochasticMatrix.identity(3), K2).value == math.inf


def test_triangle_matches_oracle_exactly():
    A = cycle(3).normalized_adjacency()
    est = gamma_plus_exact(A, K2)
    assert brute_force(A, K2) == Fraction(5, 3)
    assert evaluate_exact(A, K2, est.f, est.g) == Fraction(5, 3)
    g = gamma_exact(A, K2)
    assert evaluate_exact(A, K2, g.f) == brute_force(A, K2, plus=False) <= Fraction(5, 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.integers(1, 4), st.integers(0, 2**32), st.sampled_from(["u2", "u3", "path3"]))
def test_engine_agrees_with_brute_force(n, d, seed, kname):
    kernels = {"u2": K2, "u3": uniform_kernel(3),
               "path3": kernel_metric_power([[0, 1, 2], [1, 0, 1], [2, 1, 0]], 2)}
    K = kernels[kname]
    if kname != "u2" and n > 4:
        n = 4
    A = random_regular(n, d, seed).normalized_adjacency()
    est = gamma_plus_exact(A, K)
    truth = brute_force(A, K)
    assert evaluate_exact(A, K, est.f, est.g) == truth
    g = gamma_exact(A, K)
    assert g.value <= est.value
    if g.f is not None:
        assert evaluate_exact(A, K, g.f) == brute_force(A, K, plus=False)


def test_cap_and_workers():
    A = random_regular(12, 3, 1).normalized_adjacency()
    with pytest.raises(EnumerationTooLarge):
        gamma_plus_exact(A, K2, cap=1000)
    one = gamma_plus_exact(A, K2)
    two = gamma_plus_exact(A, K2, workers=2)
    assert (one.value, one.f, one.g) == (two.value, two.f, two.g)
    assert evaluate(A, K2, one.f, one.g) == pytest.approx(one.value, rel=1e-12)


def test_search_is_lower_bound_and_reproducible():
    for seed in range(5):
        A = random_regular(6, 3, seed).normalized_adjacency()
        K = kernel_metric_power([[0, 1, 2], [1, 0, 1], [2, 1, 0]], 2)
        ex = gamma_plus_exact(A, K)
        prev = -1.0
        for r in (1, 3, 10):
            s = gamma_plus_search(A, K, restarts=r, seed=seed)
            assert s.kind == "lower_bound"
            assert s.value <= ex.value * (1 + 1e-12)
            assert s.value >= prev
            prev = s.value
            assert evaluate(A, K, s.f, s.g) == pytest.approx(s.value, rel=1e-12)
        assert gamma_plus_search(A, K, 10, seed) == gamma_plus_search(A, K, 10, seed)


def test_search_finds_bipartite_infinity():
    assert gamma_plus_search(cycle(6).normalized_adjacency(), K2, 5, 0).value == math.inf


def test_search_below_spectral_for_real_line():
    rng = np.random.default_rng(3)
    for i in range(5):
        G = random_regular(12, 4, i)
        K = real_line_kernel(rng.standard_normal(6))
        s = gamma_plus_search(G.normalized_adjacency(), K, 5, i)
        assert s.value <= spectrum(G).gamma_plus + 1e-6


def test_linear_to_nonlinear_bound():
    rng = np.random.default_rng(8)
    for i in range(10):
        A = random_regular(int(rng.integers(2, 5)), int(rng.integers(2, 5)), i).normalized_adjacency()
        K = real_line_kernel(rng.standard_normal(3))
        lam = spectrum(A).lambda_abs
        val = gamma_plus_exact(A, K).value
        bound = math.inf if lam >= 1 else 64 / (1 - lam) ** 2
        assert val <= bound


def test_edge_completion_at_most_doubles():
    for seed in range(6):
        G = random_regular(4, 2, seed)
        base = gamma_plus_exact(G.normalized_adjacency(), K2).value
        for dp in (3, 4, 5):
            assert gamma_plus_exact(edge_complete(G, dp).normalized_adjacency(), K2).value <= 2 * base + 1e-9


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_cycle_with_loops_bound(m):
    val = gamma_plus_exact(cycle_with_loops(m).normalized_adjacency(), K2).value
    assert val <= 4 * m * m


def test_doubling_sandwich_small():
    for seed in range(8):
        A = random_regular(3, 2, seed).normalized_adjacency()
        gp = gamma_plus_exact(A, K2).value
        gd = gamma_exact(double(A), K2).value
        assert 0.4 * gd <= gp * (1 + 1e-9) and gp <= 2 * gd * (1 + 1e-9)
        for m in (2, 3):
            lhs = gamma_exact(double(cesaro_matrix(A, m)), K2).value
            rhs = gamma_exact(cesaro_matrix(double(A), m), K2).value
            assert lhs <= 9 * rhs * (1 + 1e-9)


def test_frechet_bound():
    G = random_regular(20, 3, 2, simple=True)
    E = frechet_embedding(G)
    # edges map to l_inf length exactly 1, so rho-length log 2
    K = kernel_log_linf(E, 1)
    for u, v in G.edges():
        assert np.abs(E[u] - E[v]).max() == (0 if u == v else 1)
        if u != v:
            assert K.K[u, v] == pytest.approx(math.log(2))
    est = frechet_lower_bound(G, 2)
    assert est.value == pytest.approx(evaluate(G.normalized_adjacency(), kernel_log_linf(E, 2), list(range(G.n))))
    assert math.isfinite(frechet_lower_bound(from_edge_list(2, [(0, 1)]), 2).value)
    with pytest.raises(Disconnected):
        frechet_lower_bound(from_edge_list(4, [(0, 1), (2, 3)]), 2)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_cesaro_frechet_matches_explicit_graph(m):
    G = random_regular(24, 3, 7, simple=True)
    assert cesaro_frechet_lower_bound(G, m, 2).value == pytest.approx(frechet_lower_bound(cesaro(G, m), 2).value,
                                                                      rel=1e-12)
    with pytest.raises(Disconnected):
        cesaro_frechet_lower_bound(G, 1, 2)


def test_distance_histogram():
    h = distance_histogram(cycle(6))
    assert h.tolist() == [6, 12, 12, 6]


def test_coarse_obstruction():
    rep = coarse_obstruction_report(from_edge_list(2, [(0, 1)]), 1.0, 2)
    assert rep.distortion_lower_bound >= 1
    G = random_regular(1024, 4, 1, simple=True)
    gp = spectrum(G).gamma_plus
    rep = coarse_obstruction_report(G, gp, 2)
    hist = distance_histogram(G)
    far = hist[rep.half_distance:].sum()
    assert 2 * far >= G.n**2 and 2 * hist[rep.half_distance + 1:].sum() < G.n**2
    assert rep.half_distance >= 0.5 * math.log(G.n)
    bounds = [coarse_obstruction_report(G, g, 2, hist).distortion_lower_bound for g in (0.1, 1, gp, 100)]
    assert all(a >= b for a, b in zip(bounds, bounds[1:]))
