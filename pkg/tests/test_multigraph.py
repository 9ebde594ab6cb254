from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlsg.errors import NonRegular, NotInvolution
from nlsg.multigraph import (
    Multigraph, StochasticMatrix, complete, cycle, from_counts, from_edge_list, from_edge_text,
    from_text, load, random_regular, single_loop, to_edge_text, to_text,
)


def assert_valid(G: Multigraph):
    G.check()
    A = G.normalized_adjacency()
    assert A.is_symmetric()
    assert A.is_doubly_stochastic()
    fixed = (G.nbr == np.arange(G.n)[:, None]) & (G.port == np.arange(G.d)[None, :])
    # a loop is exactly one fixed slot, counted once on the diagonal
    assert np.array_equal(np.diag(G.adjacency_counts()), fixed.sum(axis=1))


def test_triangle():
    G = from_edge_list(3, [(0, 1), (1, 2), (2, 0)])
    assert (G.n, G.d) == (3, 2)
    assert_valid(G)
    assert G.normalized_adjacency() == StochasticMatrix(np.ones((3, 3), dtype=np.int64) - np.eye(3, dtype=np.int64), 2)


def test_single_loop():
    G = from_edge_list(1, [], loops=[1])
    assert (G.n, G.d) == (1, 1)
    assert G.rot(0, 0) == (0, 0)
    assert G == single_loop()
    assert G.normalized_adjacency().fractions() == [[Fraction(1)]]


def test_edge_with_loops():
    G = from_edge_list(2, [(0, 1)], loops=[1, 1])
    assert G.d == 2
    assert G.normalized_adjacency().fractions() == [[Fraction(1, 2)] * 2] * 2
    assert_valid(G)


def test_double_edge_adjacency():
    G = from_edge_list(2, [(0, 1), (0, 1)])
    assert G.normalized_adjacency().fractions() == [[0, 1], [1, 0]]
    assert G.is_bipartite()


def test_non_regular_names_vertex():
    with pytest.raises(NonRegular) as exc:
        from_edge_list(3, [(0, 1), (1, 2)])
    assert exc.value.vertex == 1


def test_non_involution_rejected():
    G = Multigraph(np.array([[1], [1]]), np.array([[0], [0]]))
    with pytest.raises(NotInvolution):
        G.check()


def test_port_permuted_triangles_share_canonical_form():
    G = cycle(3)
    swapped = Multigraph(G.nbr[:, ::-1], 1 - G.port[:, ::-1])
    swapped.check()
    assert swapped != G
    assert swapped.canonical_form() == G.canonical_form()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(1, 7), st.integers(0, 2**32))
def test_random_regular_invariants(n, d, seed):
    G = random_regular(n, d, seed)
    assert (G.n, G.d) == (n, d)
    assert_valid(G)
    C = G.canonical_form()
    assert C.canonical_form() == C
    assert np.array_equal(C.adjacency_counts(), G.adjacency_counts())
    assert C.normalized_adjacency() == G.normalized_adjacency()


def test_random_regular_simple():
    G = random_regular(20, 3, 5, simple=True)
    counts = G.adjacency_counts()
    assert counts.max() == 1 and np.trace(counts) == 0


def test_from_counts_roundtrip():
    G = random_regular(12, 5, 3)
    assert from_counts(G.adjacency_counts()) == G.canonical_form()


def test_text_roundtrip(tmp_path):
    G = random_regular(9, 3, 11)
    assert from_text(to_text(G)) == G
    assert from_edge_text(to_edge_text(G)).normalized_adjacency() == G.normalized_adjacency()
    p = tmp_path / "g.txt"
    p.write_text(to_text(G))
    assert load(p) == G
    p.write_text("0 1\n1 2\n2 0\n")
    assert load(p) == cycle(3)


def test_text_rejects_non_involution():
    text = "nlsg-graph v1\nvertices 2\ndegree 1\n0 0 -> 1 0\n1 0 -> 1 0\n"
    with pytest.raises(NotInvolution):
        from_text(text)


def test_exact_power_and_matmul():
    A = complete(3).normalized_adjacency()
    half = Fraction(1, 2)
    assert A.power(2).fractions() == [[half, Fraction(1, 4), Fraction(1, 4)],
                                       [Fraction(1, 4), half, Fraction(1, 4)],
                                       [Fraction(1, 4), Fraction(1, 4), half]]
    assert A.power(0) == StochasticMatrix.identity(3)


def test_large_exact_power_switches_to_python_ints():
    A = random_regular(6, 7, 1).normalized_adjacency()
    P = A.power(30)
    assert P.is_doubly_stochastic()
    assert np.allclose(P.dense(), np.linalg.matrix_power(A.dense(), 30))


def test_connectivity_flags():
    assert cycle(5).is_connected() and not cycle(5).is_bipartite()
    assert cycle(6).is_bipartite()
    two = from_edge_list(4, [(0, 1), (2, 3)])
    assert not two.is_connected()
