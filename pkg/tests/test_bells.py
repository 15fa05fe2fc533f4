import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psi_lab.bells import (SmoothnessExceeded, SplineProfile, get_profile, make_meyer,
                           make_shannon, make_spline, mollified_shannon, profile_from_dict,
                           spline_basis_matrix, uniform_knots)


def test_shannon_values(shannon):
    x = np.array([0.5, 1.0, 1.5, 2.0, 2.5])
    np.testing.assert_allclose(shannon(x), [0, 2**-0.5, 2**-0.5, 2**-0.5, 0])
    assert shannon.smoothness_order == 0
    assert shannon.support == (1.0, 2.0)


def test_meyer_support_and_breakpoints(meyer):
    assert meyer.support == pytest.approx((1 / 3, 4 / 3))
    assert meyer.breakpoints == pytest.approx((1 / 3, 2 / 3, 4 / 3))
    x = np.array([0.2, 1 / 3, 4 / 3, 2.0])
    np.testing.assert_allclose(meyer(x), 0.0, atol=1e-15)


@given(st.floats(min_value=0.05, max_value=40.0))
@settings(max_examples=200, deadline=None)
def test_meyer_dyadic_partition_of_unity(x):
    # sum_j b(x / 2^j)^2 = 1 for every x > 0
    m = make_meyer()
    total = sum(float(m(x / 2.0**j)) ** 2 for j in range(-8, 10))
    assert total == pytest.approx(1.0, abs=1e-13)


def test_shannon_dyadic_sum_half(shannon):
    # off the dyadic points the blocks [2^j, 2^(j+1)] tile (0, inf) once
    x = np.array([0.3, 1.7, 5.5, 100.3])
    total = sum(shannon(x / 2.0**j) ** 2 for j in range(-8, 10))
    np.testing.assert_allclose(total, 0.5)


@pytest.mark.parametrize("order", [3, 7])
def test_meyer_derivatives_match_finite_differences(order):
    m = make_meyer(order)
    x = np.linspace(0.35, 1.32, 41)
    h = 1e-5
    for k in range(1, min(order, 3) + 1):
        fd = (m.eval_derivative(k - 1, x + h) - m.eval_derivative(k - 1, x - h)) / (2 * h)
        scale = max(1.0, float(np.max(np.abs(fd))))
        np.testing.assert_allclose(m.eval_derivative(k, x), fd, atol=1e-5 * scale)


def test_meyer_smooth_at_junctions(meyer):
    # all derivatives up to the smoothness order vanish at the support ends
    for m in range(meyer.smoothness_order + 1):
        ends = meyer.eval_derivative(m, np.array([1 / 3 + 1e-12, 4 / 3 - 1e-12]))
        assert np.max(np.abs(ends)) < 1e-6


def test_derivative_beyond_smoothness_warns(shannon):
    with pytest.warns(SmoothnessExceeded):
        out = shannon.eval_derivative(1, np.array([1.5]))
    assert out[0] == 0.0


def test_sup_norm(shannon, meyer):
    assert shannon.sup_norm(0) == pytest.approx(2**-0.5)
    assert meyer.sup_norm(0) == pytest.approx(1.0, abs=1e-12)
    assert meyer.sup_norm(2) >= meyer.sup_norm(1) >= meyer.sup_norm(0)


def test_spline_basis_partition_of_unity():
    knots = uniform_knots((0.5, 2.5), 12, 3)
    # full support of the clamped-free basis: sum is 1 on the inner knot span
    x = np.linspace(knots[3], knots[-4], 50)
    B = spline_basis_matrix(knots, 3, x)
    np.testing.assert_allclose(B.sum(axis=1), 1.0, atol=1e-12)


def test_spline_roundtrip_and_derivative():
    sp = mollified_shannon()
    assert isinstance(sp, SplineProfile)
    assert sp.support == pytest.approx((0.25, 3.0))
    x = np.linspace(0.3, 2.9, 30)
    h = 1e-6
    fd = (sp(x + h) - sp(x - h)) / (2 * h)
    np.testing.assert_allclose(sp.eval_derivative(1, x), fd, atol=1e-6)
    again = profile_from_dict(json.loads(json.dumps(sp.to_dict())))
    np.testing.assert_allclose(again(x), sp(x))


def test_make_spline_validation():
    with pytest.raises(ValueError):
        make_spline([(0.5, 1.0)], (0.0, 1.0))
    with pytest.raises(ValueError):
        make_spline([(0.5, 1.0), (0.4, 1.0)], (0.1, 1.0))
    zero = make_spline([], (0.5, 1.5), n_basis=6)
    assert not np.any(zero(np.linspace(0.5, 1.5, 9)))


def test_get_profile():
    assert get_profile("shannon").kind == "shannon"
    assert get_profile("meyer7").smoothness_order == 7
    m = make_meyer()
    assert get_profile(m) is m
    with pytest.raises(ValueError):
        get_profile("haar")


def test_profile_dict_roundtrip(meyer, shannon):
    for b in (meyer, shannon, make_meyer(5)):
        again = profile_from_dict(json.loads(json.dumps(b.to_dict())))
        x = np.linspace(0.2, 2.2, 17)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            np.testing.assert_array_equal(again(x), b(x))


def test_invalid_support():
    with pytest.raises(ValueError):
        SplineProfile(uniform_knots((0.0, 1.0), 6), np.zeros(6))
