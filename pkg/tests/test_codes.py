import itertools
import math

import numpy as np
import pytest

from nlsg.codes import BinaryCode, cosets, dual, from_text, good_code, min_distance, reduce, to_text
from nlsg.errors import NoCodeFound, TooLarge
from nlsg.hypercube import popcounts, wht


def span_oracle(C):
    """Every GF(2) combination of the rows, by itertools."""
    words = set()
    for sel in itertools.product((0, 1), repeat=C.k):
        w = 0
        for s, r in zip(sel, C.rows):
            if s:
                w ^= r
        words.add(w)
    return words


def test_repetition_and_parity():
    R = BinaryCode.repetition(3)
    assert min_distance(R) == 3
    P = dual(R)
    assert P.k == 2 and min_distance(P) == 2
    assert dual(P) == R


def test_full_and_zero():
    F = BinaryCode.full(5)
    assert min_distance(F) == 1
    assert dual(F) == BinaryCode.zero(5)
    assert min_distance(BinaryCode.zero(5)) == math.inf


def test_canonical_form():
    a = BinaryCode.from_matrix([[1, 1, 0, 1], [0, 1, 1, 1]])
    b = BinaryCode.from_matrix([[1, 0, 1, 0], [0, 1, 1, 1], [1, 0, 1, 0]])
    assert a == b and a.k == 2
    piv = a.pivots
    assert piv == sorted(piv, reverse=True)
    for r, p in zip(a.rows, piv):
        assert r.bit_length() - 1 == p
        assert sum(o >> p & 1 for o in a.rows) == 1


def test_dual_orthogonality_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 14))
        C = BinaryCode.from_matrix(rng.integers(0, 2, size=(int(rng.integers(1, n + 1)), n)))
        D = dual(C)
        assert C.k + D.k == n
        assert not ((C.G.astype(int) @ D.G.T.astype(int)) % 2).any()
        assert dual(D) == C


def test_min_distance_against_popcount_oracle():
    rng = np.random.default_rng(12)
    for _ in range(20):
        C = BinaryCode.from_matrix(rng.integers(0, 2, size=(2, 12)))
        if C.k == 0:
            continue
        truth = min(bin(w).count("1") for w in span_oracle(C) if w)
        assert min_distance(C) == truth
        assert set(C.codewords().tolist()) == span_oracle(C)


def test_enumeration_limit():
    with pytest.raises(TooLarge):
        min_distance(BinaryCode.full(25))


def test_good_codes():
    C = good_code(10, seed=1)
    assert C.k == 1 and min_distance(C) >= 1
    C = good_code(20, seed=20)
    assert (C.n, C.k) == (20, 2) and min_distance(C) >= 2
    assert good_code(20, seed=20) == C
    with pytest.raises(NoCodeFound):
        good_code(6, seed=0, dim=3, distance=6, budget=50)


def test_cosets_partition():
    rng = np.random.default_rng(3)
    for n in (1, 4, 7, 10):
        k = int(rng.integers(0, n + 1))
        C = BinaryCode.from_matrix(rng.integers(0, 2, size=(max(k, 1), n))) if k else BinaryCode.zero(n)
        cl = cosets(C)
        assert cl.count * cl.size == 1 << n and cl.count == 1 << (n - C.k)
        assert np.array_equal(np.bincount(cl.label), np.full(cl.count, cl.size))
        words = C.codewords()
        for x in rng.integers(0, 1 << n, size=10):
            members = x ^ words
            assert cl.reps[cl.label[x]] == members.min()
            assert np.all(cl.label[members] == cl.label[x])
    assert cosets(BinaryCode.zero(4)).count == 16
    assert cosets(BinaryCode.full(4)).count == 1
    assert np.array_equal(reduce(BinaryCode.full(3), np.arange(8)), np.zeros(8))


def test_coset_constant_functions_have_fourier_tail():
    for n, seed in [(10, 1), (12, 2), (16, 3), (20, 20)]:
        C = good_code(n, seed)
        m = min_distance(C)
        cl = cosets(dual(C))
        f = np.random.default_rng(seed).standard_normal(cl.count)[cl.label]
        c = wht(f)
        w = popcounts(n)
        assert np.abs(c[(w > 0) & (w < m)]).max(initial=0) < 1e-12


def test_text_round_trip():
    C = good_code(12, seed=5)
    text = to_text(C)
    assert text.splitlines()[:3] == ["nlsg-code v1", "length 12", "dimension 2"]
    assert from_text(text) == C
    with pytest.raises(ValueError):
        from_text("nlsg-code v1\nlength 3\ndimension 2\n110\n110\n")
