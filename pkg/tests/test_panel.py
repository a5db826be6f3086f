import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_ratio
from shortpanel import (
    as_panel,
    estimate_change_point,
    partial_sum_path,
    power_weights,
    ratio_statistic,
    residuals,
    sigma2_hat,
)
from shortpanel.errors import (
    DegenerateDenominator,
    InvalidArgument,
    NonFiniteData,
    ShortPanel,
    ZeroVariance,
)


# ratio_statistic


def test_ratio_step_at_end_is_zero():
    assert ratio_statistic([0, 0, 0, 1]) == 0.0


def test_ratio_alternating():
    assert ratio_statistic([0, 1, 0, 1]) == pytest.approx(1.0, abs=1e-15)


def test_ratio_constant_panels_degenerate():
    with pytest.raises(DegenerateDenominator) as exc:
        ratio_statistic(np.full((2, 4), 3.0))
    assert exc.value.details["t"] == 2


def test_ratio_needs_four_points():
    with pytest.raises(ShortPanel):
        ratio_statistic(np.zeros((3, 3)))


def test_non_finite_rejected():
    with pytest.raises(NonFiniteData):
        as_panel([[0, 1, np.nan, 2]])


def test_as_panel_read_only():
    y = as_panel(np.arange(8.0).reshape(2, 4))
    assert not y.flags.writeable


def test_partial_sum_path():
    y = np.array([[1.0, 2, 3, 4], [0, 1, 0, 1]])
    np.testing.assert_array_equal(partial_sum_path(y), [1, 4, 7, 12])


def _finite_panels(max_n=3):
    return st.integers(4, 6).flatmap(
        lambda T: st.integers(1, max_n).flatmap(
            lambda n: arrays(np.float64, (n, T), elements=st.floats(-10, 10, allow_nan=False, width=64))
        )
    )


@settings(max_examples=200, deadline=None)
@given(_finite_panels())
def test_ratio_matches_brute_force(y):
    ref = brute_ratio(y)
    if ref is None:
        with pytest.raises(DegenerateDenominator):
            ratio_statistic(y)
        return
    # skip nearly degenerate draws where floors differ
    try:
        got = ratio_statistic(y)
    except DegenerateDenominator:
        return
    assert got == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_ratio_brute_force_random(rng):
    for _ in range(100):
        T = int(rng.integers(4, 7))
        n = int(rng.integers(1, 4))
        y = rng.standard_normal((n, T))
        assert abs(ratio_statistic(y) - brute_ratio(y)) <= 1e-12 * max(1.0, brute_ratio(y))


@pytest.mark.parametrize("c", [-3.0, 0.01, 1e6])
def test_ratio_scale_invariance(rng, c):
    y = rng.standard_normal((20, 8))
    assert ratio_statistic(c * y) == pytest.approx(ratio_statistic(y), rel=1e-10)


def test_location_invariance(rng):
    y = rng.standard_normal((15, 9))
    shifted = y + rng.uniform(-50, 50, size=(15, 1))
    assert ratio_statistic(shifted) == pytest.approx(ratio_statistic(y), rel=1e-9)
    assert estimate_change_point(shifted).tau_hat == estimate_change_point(y).tau_hat
    np.testing.assert_allclose(residuals(shifted, 4), residuals(y, 4), atol=1e-12)


def test_permutation_invariance(rng):
    y = rng.standard_normal((12, 7))
    p = rng.permutation(12)
    assert ratio_statistic(y[p]) == pytest.approx(ratio_statistic(y), rel=1e-12)
    np.testing.assert_allclose(estimate_change_point(y[p]).objective, estimate_change_point(y).objective, rtol=1e-12)


# estimate_change_point


def test_estimate_hand_example():
    est = estimate_change_point([0, 0, 1, 1], power_weights(2))
    assert est.tau_hat == 2
    np.testing.assert_allclose(est.objective, [0.0, 2 / 27, 1 / 16], atol=1e-15)
    np.testing.assert_array_equal(est.times, [2, 3, 4])
    assert round(est.objective[1], 4) == 0.0741


def test_estimate_constant_ties_to_smallest():
    est = estimate_change_point(np.full((4, 6), 2.5))
    assert est.tau_hat == 2
    assert np.all(est.objective == 0)


def test_estimate_weight_forms_agree(rng):
    y = rng.standard_normal((10, 8))
    a = estimate_change_point(y).objective
    b = estimate_change_point(y, 2.0).objective
    c = estimate_change_point(y, power_weights(2)).objective
    d = estimate_change_point(y, np.arange(2, 9) ** 2.0).objective
    for other in (b, c, d):
        np.testing.assert_array_equal(a, other)


def test_estimate_bad_weights():
    with pytest.raises(InvalidArgument):
        estimate_change_point(np.zeros((2, 5)), np.ones(3))
    with pytest.raises(InvalidArgument):
        estimate_change_point(np.zeros((2, 5)), lambda t: -t)


def test_estimate_no_change_concentrates_at_T():
    hits = 0
    for k in range(100):
        y = np.random.default_rng(k).standard_normal((200, 10))
        hits += estimate_change_point(y).no_change
    assert hits >= 90


def test_estimate_dominant_step():
    rng = np.random.default_rng(3)
    for n in (1, 2, 17):
        y = 0.01 * rng.standard_normal((n, 10))
        y[:, 5:] += 5.0
        assert estimate_change_point(y).tau_hat == 5


# residuals


def test_residuals_exact_step():
    np.testing.assert_array_equal(residuals([1, 1, 5, 5], 2), [[0, 0, 0, 0]])


def test_residuals_alternating():
    np.testing.assert_allclose(residuals([0, 1, 0, 1], 2), [[-0.5, 0.5, -0.5, 0.5]])


def test_residuals_full_row_mean(rng):
    y = rng.standard_normal((5, 7))
    np.testing.assert_allclose(residuals(y, 7), y - y.mean(axis=1, keepdims=True), atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(4, 12).flatmap(lambda T: st.tuples(st.just(T), st.integers(2, T))), st.integers(0, 2**32 - 1))
def test_residual_row_sums_vanish(t_tau, seed):
    T, tau = t_tau
    y = np.random.default_rng(seed).normal(0, 100, size=(6, T))
    e = residuals(y, tau)
    np.testing.assert_allclose(e[:, :tau].sum(axis=1), 0, atol=1e-10)
    if tau < T:
        np.testing.assert_allclose(e[:, tau:].sum(axis=1), 0, atol=1e-10)


def test_residuals_tau_range():
    with pytest.raises(InvalidArgument):
        residuals(np.zeros((2, 5)), 1)
    with pytest.raises(InvalidArgument):
        residuals(np.zeros((2, 5)), 6)


# sigma2_hat


def test_sigma2_unit_entries():
    assert sigma2_hat(np.where(np.arange(12).reshape(3, 4) % 2, 1.0, -1.0)) == 1.0


def test_sigma2_zero():
    with pytest.raises(ZeroVariance):
        sigma2_hat(np.zeros((2, 4)))


def test_sigma2_arithmetic():
    assert sigma2_hat([[0.5, -0.5, 1, -1]]) == pytest.approx(0.625)
