import math

import numpy as np
import pytest

from nlsg import verify
from nlsg.spectral import spectrum


def test_le_is_infinity_aware():
    assert verify._le(math.inf, math.inf) and verify._le(5.0, math.inf)
    assert not verify._le(math.inf, 5.0)
    assert verify._le(1.0 + 1e-12, 1.0) and not verify._le(1.01, 1.0)


def test_random_doubly_stochastic():
    for s in range(20):
        A = verify.random_doubly_stochastic(s)
        M = A.num
        assert np.array_equal(M, M.T) and (M.sum(axis=0) == A.den).all() and (M.sum(axis=1) == A.den).all()
        assert spectrum(A).lambda_abs <= 1 + 1e-12


def test_small_zigzag_instances_cover_shapes():
    inst = list(verify.small_zigzag_instances())
    assert len(inst) >= 50
    assert all(G1.n * G1.d <= 10 and G2.n == G1.d for G1, G2 in inst)
    assert {(G1.n, G1.d) for G1, _ in inst} >= {(2, 5), (5, 2), (10, 1), (3, 3)}


def test_corpus_pairs_are_compatible():
    pairs = list(verify.corpus_zigzag_pairs())
    assert pairs and all(G2.n == G1.d for _, G1, G2 in pairs)


def test_small_runs_and_table():
    c = verify.check_zigzag_spectral(instances=10, with_corpus=False)
    assert c.passed and c.instances == 10 and c.seconds >= 0
    assert c.line().startswith("PASS  zigzag-spectral")
    checks = verify.run_suites(["doubling"])
    assert [c.key for c in checks] == ["doubling-sandwich", "doubling-commute"]
    assert verify.table(checks).count("\n") == 1
    with pytest.raises(KeyError):
        verify.run_suites(["nope"])


def test_reruns_are_identical():
    a = verify.check_linear_to_nonlinear(instances=10)
    b = verify.check_linear_to_nonlinear(instances=10)
    assert a.line() == b.line()
