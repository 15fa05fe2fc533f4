import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from psi_lab.quadrature import (NonConvergentWarning, QuadSpec, fourier_moments, integrate,
                                integrate_products, l2_error, panel_edges, refinement_errors,
                                rule)


def test_rule_integrates_polynomials_exactly():
    nodes, weights = rule(0.5, 2.5)
    for p in range(10):
        exact = (2.5 ** (p + 1) - 0.5 ** (p + 1)) / (p + 1)
        assert np.dot(weights, nodes**p) == pytest.approx(exact, rel=1e-14)


def test_panel_edges_resolve_oscillation_and_breakpoints():
    edges = panel_edges(0.0, 2.0, osc_freq=10.0, breakpoints=(0.7,))
    assert 0.7 in edges
    assert len(edges) - 1 >= 4 * 10 * 2
    assert np.all(np.diff(edges) > 0)
    with pytest.raises(ValueError):
        panel_edges(1.0, 1.0)


@given(st.floats(0.0, 3.0), st.floats(0.1, 4.0), st.integers(-200, 200))
@settings(max_examples=60, deadline=None)
def test_oscillatory_integral_closed_form(a, length, k):
    b = a + length
    res = integrate(lambda x: np.exp(2j * np.pi * k * x), (a, b), osc_freq=abs(k))
    if k == 0:
        exact = length
    else:
        exact = (np.exp(2j * np.pi * k * b) - np.exp(2j * np.pi * k * a)) / (2j * np.pi * k)
    assert res.converged
    assert abs(res.value - exact) <= 1e-11


def test_integrate_against_scipy():
    # independent adaptive oracle
    g = lambda x: np.exp(-x) * np.cos(3 * x) * np.sqrt(x)
    ref, _ = sp_integrate.quad(g, 0.2, 4.0, epsabs=1e-13, epsrel=1e-13)
    value, err = integrate(g, (0.2, 4.0), osc_freq=0.5)
    assert abs(value - ref) <= 1e-11
    assert err <= 1e-11


def test_breakpoints_recover_accuracy():
    g = lambda x: np.where(x < 1.3, 1.0, 0.0)
    res = integrate(g, (0.0, 2.0), breakpoints=(1.3,))
    assert res.value == pytest.approx(1.3, abs=1e-14)


def test_nonconvergence_is_reported():
    spec = QuadSpec(tol=1e-14, max_refinements=1)
    res = integrate(lambda x: np.abs(x - 1.234567), (0.0, 2.0), spec=spec)
    assert not res.converged
    with pytest.warns(NonConvergentWarning):
        l2_error(lambda x: np.abs(x - 1.234567) ** 0.25, lambda x: 0 * x, (0.0, 2.0), spec=spec)


def test_fourier_moments_match_direct_route():
    ks = np.arange(-150, 151)
    g = lambda x: x**2 * np.exp(-x)
    got = fourier_moments(g, (0.5, 3.5), ks, 2.0)
    direct = integrate(lambda x: g(x) * np.exp(2j * np.pi * np.multiply.outer(ks, x) / 2.0),
                       (0.5, 3.5), osc_freq=150 / 2.0)
    assert got.converged
    np.testing.assert_allclose(got.value, direct.value, atol=1e-12)


def test_integrate_products_orthogonality():
    # Fourier modes on [0, 1] are orthonormal
    ks = np.arange(-8, 9)
    rows = lambda x: np.exp(2j * np.pi * np.multiply.outer(ks, x))
    G = integrate_products(rows, rows, (0.0, 1.0), osc_freq=16.0).value
    np.testing.assert_allclose(G, np.eye(len(ks)), atol=1e-13)


def test_refinement_errors_decrease():
    spec = QuadSpec(points_per_panel=4)
    errs = refinement_errors(lambda x: np.exp(np.sin(5 * x)), (0.0, 3.0), 1.0, spec, levels=4)
    assert all(e1 < e0 for e0, e1 in zip(errs, errs[1:]))
    assert errs[-1] < 1e-10


def test_l2_error():
    assert l2_error(np.sin, lambda x: 0 * x, (0.0, math.pi)) == pytest.approx(math.sqrt(math.pi / 2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert l2_error(np.cos, np.cos, (0.0, 1.0)) == 0.0


def test_quadspec_validation():
    for bad in ({"points_per_panel": 1}, {"panels_per_cycle": 0}, {"tol": 0.0},
                {"max_refinements": -1}):
        with pytest.raises(ValueError):
            QuadSpec(**bad)
