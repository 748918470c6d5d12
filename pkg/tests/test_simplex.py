import math

import numpy as np
import pytest

from besselmoments.moments import MomentIndex, moment_value
from besselmoments.simplex import (
    CHUNK,
    McEstimate,
    chunk_generator,
    cyclic_denominator,
    mc_beta_law,
    mc_four,
    mc_general,
    mc_root,
    stderr_scaling,
)
from besselmoments.zeta_ring import ZetaExpr, evaluate
from besselmoments.zeta_series import decompose_In

I1100 = float(evaluate(ZetaExpr.from_tilde(1, 1) / 16, 20))  # simplex integral at beta = 1
I2 = float(evaluate(decompose_In(2), 20))
I3 = float(evaluate(decompose_In(3), 20))


def test_decimals_of_targets():
    assert f"{I1100:.9f}" == "0.325449948"
    assert f"{2 * I1100:.8f}" == "0.65089990"
    assert f"{I2:.8f}" == "8.41439832"
    assert f"{I3:.8f}" == "3.60617071"


def test_mc_four_1100():
    est = mc_four(MomentIndex((1, 1, 0, 0)), 2 * 10**6, seed=11)
    assert est.sigmas(2 * I1100) < 3


def test_mc_four_weighted():
    idx = MomentIndex((1, 1, 0, 0), 1, 1)
    target = float(evaluate(moment_value(idx), 20))
    assert target == pytest.approx(6 * I1100)
    assert mc_four(idx, 10**6, seed=12).sigmas(target) < 4


def test_mc_four_heavy_tail_root():
    # (0,0,0,0) has divergent variance: a 4 sigma window still holds at 10^7 but is flagged
    est = mc_four(MomentIndex((0, 0, 0, 0)), 10**7, seed=13)
    assert est.sigmas(I2) < 4
    r = stderr_scaling(lambda n, s: mc_four(MomentIndex((0, 0, 0, 0)), n, s), 10**5, 10**6, 13)
    assert r["heavy_tail"]


def test_deterministic_and_thread_independent():
    idx = MomentIndex((2, 1, 0, 0))
    a = mc_four(idx, 3 * CHUNK + 17, seed=5)
    b = mc_four(idx, 3 * CHUNK + 17, seed=5)
    c = mc_four(idx, 3 * CHUNK + 17, seed=5, workers=4)
    assert a == b == c
    assert mc_four(idx, 1000, seed=6) != a


def test_chunk_streams_distinct():
    x = chunk_generator(1, 0).random(4)
    y = chunk_generator(1, 1).random(4)
    z = chunk_generator(2, 0).random(4)
    assert not np.array_equal(x, y) and not np.array_equal(x, z)
    assert np.array_equal(x, chunk_generator(1, 0).random(4))


def test_beta_one():
    assert mc_beta_law(1.0, 2 * 10**6, seed=21).sigmas(I1100) < 3


def test_beta_ratio():
    a = mc_beta_law(1.0, 10**6, seed=31)
    b = mc_beta_law(2.0, 10**6, seed=32)
    ratio = b.mean / a.mean
    # delta-method stderr of the ratio
    se = ratio * math.hypot(a.stderr / a.mean, b.stderr / b.mean)
    assert abs(ratio - 8) < 3 * se


def test_beta_half():
    assert mc_beta_law(0.5, 10**6, seed=41).sigmas(0.125 * I1100) < 4


def test_beta_domain():
    with pytest.raises(ValueError):
        mc_beta_law(0.0, 10, 1)


def test_root_windows():
    assert mc_root(2, 2 * 10**6, seed=51).sigmas(I2) < 4
    assert mc_root(3, 2 * 10**6, seed=52).sigmas(I3) < 4


def test_general_1100_is_simplex_integral():
    assert mc_general(2, [1, 1, 0, 0], 10**6, seed=61).sigmas(I1100) < 4


def test_general_zero_monomial_is_root():
    assert mc_general(3, [0] * 6, 10**5, seed=71) == mc_root(3, 10**5, seed=71)


def test_general_validation():
    with pytest.raises(ValueError):
        mc_general(1, [0, 0], 10, 1)
    with pytest.raises(ValueError):
        mc_general(2, [0, 0, 0], 10, 1)
    with pytest.raises(ValueError):
        mc_general(2, [0, 0, -1, 0], 10, 1)
    with pytest.raises(ValueError):
        mc_root(2, 0, 1)


def test_cyclic_denominator_n2_is_four_variable():
    rng = np.random.default_rng(0)
    a1, b1, a2, b2 = rng.random((4, 10))
    d = cyclic_denominator(np.array([a1, a2]), np.array([b1, b2]))
    ref = a1 * b1 * a2 + a1 * b1 * b2 + a1 * a2 * b2 + b1 * a2 * b2
    assert np.allclose(d, ref, rtol=1e-14)


ESTIMATORS = {
    "four(1,1,0,0)": (lambda n, s: mc_four(MomentIndex((1, 1, 0, 0)), n, s), 2 * I1100),
    "beta=1": (lambda n, s: mc_beta_law(1.0, n, s), I1100),
    "root n=2": (lambda n, s: mc_root(2, n, s), I2),
    "root n=3": (lambda n, s: mc_root(3, n, s), I3),
    "general (1,1,0,0)": (lambda n, s: mc_general(2, [1, 1, 0, 0], n, s), I1100),
}


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(ESTIMATORS))
def test_coverage_20_seeds(name):
    run, target = ESTIMATORS[name]
    hits = sum(run(10**6, 1000 + s).sigmas(target) < 4 for s in range(20))
    assert hits >= 19


@pytest.mark.slow
def test_stderr_scaling_finite_variance():
    # a1 b1 a2 b2 / D is bounded, so its variance is finite
    r = stderr_scaling(lambda n, s: mc_general(2, [1, 1, 1, 1], n, s), 10**5, 10**7, 3)
    assert not r["heavy_tail"]
    assert 1 / 1.5 <= r["ratio"] <= 1.5


def test_estimate_helpers():
    e = McEstimate(1.0, 0.5, 10, 3)
    assert e.sigmas(2.0) == 2.0
    assert e.to_dict(2.0) == {"mean": 1.0, "stderr": 0.5, "samples": 10, "seed": 3, "target": 2.0, "sigmas": 2.0}
    assert McEstimate(1.0, 0.0, 1, 0).sigmas(1.0) == 0.0
