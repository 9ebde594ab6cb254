from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlsg.errors import DegreeCapExceeded, DegreeTooSmall, IncompatibleSizes
from nlsg.graph_ops import (
    cesaro, cesaro_matrix, cycle_with_loops, double, edge_complete, power, replacement, tensor, zigzag,
)
from nlsg.multigraph import StochasticMatrix, complete, cycle, from_edge_list, random_regular, single_loop
from nlsg.spectral import spectrum

DOUBLE_EDGE = from_edge_list(2, [(0, 1), (0, 1)])


def test_zigzag_sizes():
    Z = zigzag(cycle(4), DOUBLE_EDGE)
    assert (Z.n, Z.d) == (8, 4)
    Z.check()


def test_zigzag_degenerate_degree_one():
    G1 = from_edge_list(4, [(0, 1), (2, 3)])
    Z = zigzag(G1, single_loop())
    assert (Z.n, Z.d) == (4, 1)
    assert Z.normalized_adjacency() == G1.normalized_adjacency()


def test_zigzag_size_mismatch():
    with pytest.raises(IncompatibleSizes):
        zigzag(cycle(4), complete(3))
    with pytest.raises(IncompatibleSizes):
        replacement(cycle(4), complete(3))


def test_zigzag_walk_definition():
    G1 = random_regular(5, 3, 7)
    G2 = random_regular(3, 2, 8)
    Z = zigzag(G1, G2)
    for u in range(G1.n):
        for a in range(G1.d):
            for i in range(G2.d):
                for j in range(G2.d):
                    a1, i1 = G2.rot(a, i)
                    v, b1 = G1.rot(u, a1)
                    b, j1 = G2.rot(b1, j)
                    assert Z.rot(u * G1.d + a, i * G2.d + j) == (v * G1.d + b, j1 * G2.d + i1)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(1, 5), st.integers(1, 4), st.integers(0, 2**32))
def test_zigzag_spectral_bound(n1, d1, d2, seed):
    G1 = random_regular(n1, d1, seed)
    G2 = random_regular(d1, d2, seed + 1)
    Z = zigzag(G1, G2)
    Z.check()
    lhs = spectrum(Z).gamma_plus
    rhs = spectrum(G1).gamma_plus * spectrum(G2).gamma_plus ** 2
    assert lhs <= rhs * (1 + 1e-9) + 1e-9


def test_replacement():
    R = replacement(cycle(4), DOUBLE_EDGE)
    assert (R.n, R.d) == (8, 3)
    R.check()
    assert R.is_connected()
    assert np.all(R.port[:, 2] == 2)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 10), st.integers(3, 5), st.integers(0, 2**32))
def test_replacement_connectivity(n, d, seed):
    G1 = random_regular(n, d, seed)
    G2 = cycle(d)
    if G1.is_connected():
        assert replacement(G1, G2).is_connected()


def test_tensor():
    G, H = random_regular(5, 3, 1), random_regular(4, 2, 2)
    T = tensor(G, H)
    T.check()
    assert (T.n, T.d) == (20, 6)
    assert np.array_equal(T.adjacency_counts(), np.kron(G.adjacency_counts(), H.adjacency_counts()))
    assert tensor(G, single_loop()) == G


def test_tensor_lambda_is_max():
    G, H = complete(5), random_regular(7, 4, 9)
    assert G.is_connected() and H.is_connected() and not H.is_bipartite()
    lam = spectrum(tensor(G, H)).lambda_abs
    assert lam == pytest.approx(max(spectrum(G).lambda_abs, spectrum(H).lambda_abs), abs=1e-10)


def test_power():
    G = random_regular(7, 3, 4)
    assert power(G, 1) == G
    for t in (2, 3, 4):
        P = power(G, t)
        P.check()
        assert P.d == 3**t
        assert P.normalized_adjacency() == G.normalized_adjacency().power(t)
        assert spectrum(P).lambda_abs == pytest.approx(spectrum(G).lambda_abs ** t, abs=1e-10)
    C2 = power(cycle(3), 2)
    assert C2.d == 4
    assert C2.normalized_adjacency() == cycle(3).normalized_adjacency().power(2)


def test_power_cap():
    with pytest.raises(DegreeCapExceeded):
        power(random_regular(10, 4, 0), 12)


def test_cesaro():
    C3 = cycle(3)
    A1 = cesaro(C3, 1)
    assert A1.normalized_adjacency() == StochasticMatrix.identity(3)
    A2 = cesaro(C3, 2)
    assert A2.d == 4
    expected = [[Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)],
                [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)],
                [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]]
    assert A2.normalized_adjacency().fractions() == expected
    G = random_regular(6, 3, 3)
    for m in range(1, 6):
        Am = cesaro(G, m)
        Am.check()
        assert Am.d == m * 3 ** (m - 1)
        assert Am.normalized_adjacency() == cesaro_matrix(G.normalized_adjacency(), m)


def test_cesaro_matrix_float_path():
    G = random_regular(6, 3, 3)
    A = G.normalized_adjacency()
    assert np.allclose(cesaro_matrix(A.dense(), 4), cesaro_matrix(A, 4).dense())
    assert cesaro_matrix(A, 1) == StochasticMatrix.identity(6)


def test_cesaro_cap():
    with pytest.raises(DegreeCapExceeded):
        cesaro(random_regular(10, 4, 0), 12)


def test_edge_complete():
    C3 = cycle(3)
    assert edge_complete(C3, 2) == C3
    E = edge_complete(C3, 5)
    E.check()
    assert E.d == 5
    counts = E.adjacency_counts()
    assert np.array_equal(counts, np.array([[1, 2, 2], [2, 1, 2], [2, 2, 1]]))
    with pytest.raises(DegreeTooSmall):
        edge_complete(C3, 1)


@pytest.mark.parametrize("m", [1, 2, 3, 7])
def test_cycle_with_loops(m):
    C = cycle_with_loops(m)
    C.check()
    assert (C.n, C.d) == (m, 3)
    assert C.is_connected()
    assert C.loop_count() >= m


def test_double():
    assert double(StochasticMatrix.identity(1)).fractions() == [[0, 1], [1, 0]]
    A = random_regular(5, 3, 2).normalized_adjacency()
    D = double(A)
    assert D.is_symmetric() and D.is_doubly_stochastic()
    w = np.linalg.eigvalsh(A.dense())
    assert np.allclose(np.sort(np.linalg.eigvalsh(D.dense())), np.sort(np.concatenate([w, -w])))
    assert np.allclose(double(A.dense()), D.dense())
