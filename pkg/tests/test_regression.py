import math

import numpy as np
import pytest

from rercens import (CensoredSample, EstimatorKind, KernelSpec, StepSurvival,
                     cr_estimate, density_estimate, evaluate_on_grid,
                     km_censoring_survival, rer_estimate, rer_pseudo_estimate)
from rercens.errors import EstimationUndefinedError

SPEC = KernelSpec()
ONE = StepSurvival.constant(1.0)


def two_point_sample():
    return CensoredSample(np.array([[0.0], [1.0]]), np.array([1.0, 2.0]),
                          np.array([1, 1]))


def test_constant_response_returns_constant():
    s = CensoredSample(np.linspace(0, 1, 7).reshape(-1, 1),
                       np.full(7, 2.0), np.ones(7, dtype=int))
    for x in (-1.0, 0.0, 0.5, 2.0):
        assert rer_estimate(s, ONE, SPEC, 0.3, [x]) == pytest.approx(2.0, abs=1e-12)
        assert cr_estimate(s, ONE, SPEC, 0.3, [x]) == pytest.approx(2.0, abs=1e-12)


def test_two_point_hand_value():
    # independent recomputation of the weight ratio
    k0 = math.exp(0.0) / math.sqrt(2 * math.pi)
    k1 = math.exp(-0.5) / math.sqrt(2 * math.pi)
    expected_rer = (k0 * 1.0 + k1 * 0.5) / (k0 * 1.0 + k1 * 0.25)
    expected_cr = (k0 * 1.0 + k1 * 2.0) / (k0 + k1)
    s = two_point_sample()
    assert rer_estimate(s, ONE, SPEC, 1.0, [0.0]) == pytest.approx(expected_rer, rel=1e-12)
    assert expected_rer == pytest.approx(1.13166, abs=5e-5)
    assert cr_estimate(s, ONE, SPEC, 1.0, [0.0]) == pytest.approx(expected_cr, rel=1e-12)
    assert expected_cr == pytest.approx(1.37754, abs=5e-5)
    assert rer_pseudo_estimate(s, ONE, SPEC, 1.0, [0.0]) == pytest.approx(expected_rer,
                                                                          rel=1e-12)


def test_all_censored_undefined_rer_zero_cr():
    s = CensoredSample(np.array([[0.0], [1.0]]), np.array([1.0, 2.0]),
                       np.array([0, 0]))
    with pytest.raises(EstimationUndefinedError):
        rer_estimate(s, ONE, SPEC, 1.0, [0.0])
    assert cr_estimate(s, ONE, SPEC, 1.0, [0.0]) == 0.0


def test_pseudo_equals_hat_without_censoring():
    rng = np.random.default_rng(3)
    xs = rng.normal(size=(25, 1))
    ys = rng.uniform(1, 3, 25)
    s = CensoredSample(xs, ys, np.ones(25, dtype=int))
    gbar_n = km_censoring_survival(s)
    for x in (-0.5, 0.0, 0.8):
        assert rer_estimate(s, gbar_n, SPEC, 0.5, [x]) == pytest.approx(
            rer_pseudo_estimate(s, ONE, SPEC, 0.5, [x]), rel=1e-12)


def test_scale_equivariance():
    rng = np.random.default_rng(4)
    xs = rng.normal(size=(20, 1))
    ys = rng.uniform(1, 3, 20)
    deltas = np.ones(20, dtype=int)
    s = CensoredSample(xs, ys, deltas)
    s2 = CensoredSample(xs, 2.5 * ys, deltas)
    for x in (-0.3, 0.4):
        assert rer_estimate(s2, ONE, SPEC, 0.6, [x]) == pytest.approx(
            2.5 * rer_estimate(s, ONE, SPEC, 0.6, [x]), rel=1e-12)
        assert cr_estimate(s2, ONE, SPEC, 0.6, [x]) == pytest.approx(
            2.5 * cr_estimate(s, ONE, SPEC, 0.6, [x]), rel=1e-12)


def test_range_bound_with_equal_weights():
    rng = np.random.default_rng(5)
    xs = rng.normal(size=(30, 1))
    ys = rng.uniform(0.5, 4.0, 30)
    s = CensoredSample(xs, ys, np.ones(30, dtype=int))
    for x in np.linspace(-2, 2, 9):
        m = rer_estimate(s, ONE, SPEC, 0.7, [x])
        assert ys.min() - 1e-12 <= m <= ys.max() + 1e-12


def test_bandwidth_limits():
    rng = np.random.default_rng(6)
    xs = np.linspace(0, 5, 12).reshape(-1, 1)
    ys = rng.uniform(1, 3, 12)
    s = CensoredSample(xs, ys, np.ones(12, dtype=int))
    pooled = ys.size and (1 / ys).sum() / (1 / ys**2).sum()
    assert rer_estimate(s, ONE, SPEC, 1e6, [2.0]) == pytest.approx(pooled, rel=1e-9)
    # h -> 0 interpolates at uncensored design points
    j = 4
    assert rer_estimate(s, ONE, SPEC, 0.02, xs[j]) == pytest.approx(ys[j], rel=1e-6)


def test_censored_duplicates_far_away_do_not_matter():
    s = two_point_sample()
    base = rer_estimate(s, ONE, SPEC, 0.1, [0.0])
    s2 = CensoredSample(np.array([[0.0], [1.0], [50.0], [50.0]]),
                        np.array([1.0, 2.0, 9.0, 9.0]),
                        np.array([1, 1, 0, 0]))
    assert rer_estimate(s2, ONE, SPEC, 0.1, [0.0]) == pytest.approx(base, rel=1e-12)


def test_weight_floor_at_top_observation():
    # largest Y uncensored: KM clamps Gbar to 0 there; left limit is used
    s = CensoredSample(np.array([[0.0], [0.2], [0.4]]),
                       np.array([1.0, 2.0, 3.0]), np.array([1, 0, 1]))
    gbar = km_censoring_survival(s)
    assert gbar.at(3.0) == 0.0
    # weights: w1 = 1/1, w3 = 1/Gbar(3-) = 1/0.5 = 2; hand ratio at x=0.2, large h
    m = rer_estimate(s, gbar, SPEC, 1e6, [0.2])
    expected = (1 * 1.0 + 2 * (1 / 3.0)) / (1 * 1.0 + 2 * (1 / 9.0))
    assert m == pytest.approx(expected, rel=1e-9)


def test_density_estimate():
    s1 = CensoredSample(np.array([[1.5]]), np.array([1.0]), np.array([1]))
    k0 = 1.0 / math.sqrt(2 * math.pi)
    assert density_estimate(s1, SPEC, 0.5, [1.5]) == pytest.approx(k0 / 0.5, rel=1e-12)
    # symmetric two-point sample
    s2 = CensoredSample(np.array([[-1.0], [1.0]]), np.array([1.0, 1.0]),
                        np.array([1, 1]))
    h = 0.8
    kh = math.exp(-0.5 / h**2) / math.sqrt(2 * math.pi)
    assert density_estimate(s2, SPEC, h, [0.0]) == pytest.approx(kh / h, rel=1e-12)
    # many standard normal draws: density at 0 near 1/sqrt(2*pi)
    rng = np.random.default_rng(7)
    xs = rng.standard_normal(20000).reshape(-1, 1)
    s3 = CensoredSample(xs, np.ones(20000), np.ones(20000, dtype=int))
    assert density_estimate(s3, SPEC, 0.15, [0.0]) == pytest.approx(0.3989, abs=0.02)


def test_density_integrates_to_one():
    rng = np.random.default_rng(8)
    xs = rng.standard_normal(400).reshape(-1, 1)
    s = CensoredSample(xs, np.ones(400), np.ones(400, dtype=int))
    grid = np.linspace(-8, 8, 2001)
    vals = [density_estimate(s, SPEC, 0.3, [x]) for x in grid]
    assert np.trapezoid(vals, grid) == pytest.approx(1.0, abs=1e-3)


def test_evaluate_on_grid():
    s = CensoredSample(np.linspace(0, 1, 6).reshape(-1, 1), np.full(6, 2.0),
                       np.ones(6, dtype=int))
    pts = np.linspace(-0.5, 1.5, 5).reshape(-1, 1)
    grid = evaluate_on_grid(s, ONE, SPEC, 0.4, pts,
                            [EstimatorKind.RER_hat, EstimatorKind.CR])
    for kind in (EstimatorKind.RER_hat, EstimatorKind.CR):
        assert np.allclose(grid.estimates[kind], 2.0, atol=1e-12)
        assert grid.undefined_counts[kind] == 0
    single = evaluate_on_grid(s, ONE, SPEC, 0.4, np.array([[0.5]]),
                              [EstimatorKind.RER_hat])
    assert single.estimates[EstimatorKind.RER_hat][0] == pytest.approx(
        rer_estimate(s, ONE, SPEC, 0.4, [0.5]), rel=1e-12)


def test_grid_undefined_points_become_nan():
    # Epanechnikov has compact support: far grid points see no data
    spec = KernelSpec(family=__import__("rercens").KernelFamily.EPANECHNIKOV, dim=1)
    s = two_point_sample()
    pts = np.array([[0.0], [100.0]])
    grid = evaluate_on_grid(s, ONE, spec, 0.5, pts, [EstimatorKind.RER_hat])
    vals = grid.estimates[EstimatorKind.RER_hat]
    assert not np.isnan(vals[0]) and np.isnan(vals[1])
    assert grid.undefined_counts[EstimatorKind.RER_hat] == 1
    csv = grid.to_csv()
    lines = csv.strip().splitlines()
    assert lines[0] == "x,m_rer"
    assert lines[2].endswith(",")
