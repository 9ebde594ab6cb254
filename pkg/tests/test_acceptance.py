"""The ten acceptance criteria, each at its stated size, tolerance and time budget."""

from nlsg import verify
from nlsg.construction import builtin_base, classical_threshold
from nlsg.data import corpus
from nlsg.spectral import spectrum


def test_01_zigzag_spectral_bound(acceptance_line):
    c = verify.check_zigzag_spectral(instances=200)
    ok = c.passed and c.instances >= 200 and c.seconds < 60
    acceptance_line(1, ok, c)
    assert ok, c.line()


def test_02_zigzag_submultiplicative_exact(acceptance_line):
    c = verify.check_zigzag_submultiplicative()
    ok = c.passed and c.instances >= 50 and c.seconds < 600
    acceptance_line(2, ok, c)
    assert ok, c.line()


def test_03_doubling_sandwiches(acceptance_line):
    a = verify.check_doubling_sandwich(instances=60)
    b = verify.check_doubling_commute(instances=60)
    ok = a.passed and b.passed and min(a.instances, b.instances) >= 50
    merged = verify.Check("doubling", ok, a.instances + b.instances, max(a.worst, b.worst),
                          f"{a.key}: worst {a.worst:.4g}; {b.key}: worst {b.worst:.4g}", a.seconds + b.seconds)
    acceptance_line(3, ok, merged)
    assert ok, a.line() + "\n" + b.line()


def test_04_cesaro_decay(acceptance_line):
    c = verify.check_cesaro_decay(instances=1000)
    ok = c.passed and c.instances == 1000
    acceptance_line(4, ok, c)
    assert ok, c.line()


def test_05_cotype_pipeline(acceptance_line):
    c = verify.check_cotype(instances=1000)
    ok = c.passed and c.instances == 1000 and verify.COTYPE_VALIDATION_SEED != verify.cotype.COTYPE_SWEEP_SEED
    acceptance_line(5, ok, c)
    assert ok, c.line()


def test_06_base_graph_pipeline(acceptance_line):
    c = verify.check_base_graph(trials=100)
    ok = c.passed and c.seconds < 300
    acceptance_line(6, ok, c)
    assert ok, c.line()


def test_07_linear_to_nonlinear(acceptance_line):
    c = verify.check_linear_to_nonlinear(instances=100)
    ok = c.passed and c.instances >= 100
    acceptance_line(7, ok, c)
    assert ok, c.line()


def test_08_classical_iteration(acceptance_line):
    # Known to fail: no base graph small enough to ship meets the t0 = 2 threshold.
    c = verify.check_classical_iteration(depth=3)
    H = builtin_base(verify.CLASSICAL_BASE)
    ok = c.passed and spectrum(H).lambda_abs <= classical_threshold(2)
    acceptance_line(8, ok, c)
    assert ok, c.line()


def test_09_degree9_finisher(acceptance_line):
    c = verify.check_finisher()
    ok = c.passed and c.instances == len(corpus())
    acceptance_line(9, ok, c)
    assert ok, c.line()


def test_10_counterexample_growth(acceptance_line):
    c = verify.check_counterexample()
    ok = c.passed and c.instances == 7 * 4 and c.seconds < 600
    acceptance_line(10, ok, c)
    assert ok, c.line()
