import json

import numpy as np
import pytest

from psi_lab.basis import IndexWindow
from psi_lab.bells import SplineProfile, make_meyer, mollified_shannon
from psi_lab.designer import (DesignConfig, design, implied_gram, midpoints, objective,
                              profile_objective, r_max, residual_A, residual_B, residual_C,
                              residuals, support_feasible)
from psi_lab.transform import gram


def test_shannon_is_an_exact_solution(shannon):
    res = residuals(shannon)
    assert res.max_abs() <= 1e-15
    assert res.r_max == r_max(shannon) == 1


def test_meyer_residuals(meyer):
    res = residuals(meyer)
    # sum_j b(x/2^j)^2 = 1 for Meyer, so C = 1/2 and A is far from zero
    np.testing.assert_allclose(res.C, 0.5, atol=1e-13)
    assert np.max(np.abs(res.A)) > 0.3
    assert res.r_max == 2


def test_residual_A_by_brute_force(meyer):
    u = np.linspace(0.01, 0.99, 17)
    brute = 2 * sum(meyer(u + ell) ** 2 for ell in range(-3, 5)) - 1
    np.testing.assert_allclose(residual_A(meyer, u), brute, atol=1e-15)


def test_residual_B_by_brute_force(meyer):
    u = np.linspace(0.01, 1.99, 13)
    brute = sum(meyer(u + 2 * ell) * meyer((u + 2 * ell) / 2) for ell in range(-3, 4))
    np.testing.assert_allclose(residual_B(meyer, 1, u), brute, atol=1e-15)


def test_residual_C_by_brute_force():
    b = mollified_shannon()
    u = np.linspace(1.01, 1.99, 11)
    brute = sum(b(u / 2.0**j) ** 2 for j in range(-8, 9)) - 0.5
    np.testing.assert_allclose(residual_C(b, u), brute, atol=1e-14)


def test_implied_gram_matches_quadrature_gram(meyer):
    # two routes to the same Gram matrix: residual Fourier coefficients vs direct quadrature
    w = IndexWindow(-1, 1, 4)
    np.testing.assert_allclose(implied_gram(meyer, w), gram(meyer, w), atol=1e-12)


def test_objective_at_zero():
    cfg = DesignConfig()
    val, grad = objective(np.zeros(cfg.n_basis), cfg)
    # A = -1 and C = -1/2 everywhere, B = 0
    assert val == pytest.approx(1.25, rel=1e-14)
    assert np.allclose(grad, 0.0)


def test_objective_matches_residual_vector_without_regulariser():
    cfg = DesignConfig(mu=0.0, samples_per_unit=32)
    b = mollified_shannon(cfg.support, cfg.n_basis, cfg.degree)
    val, _ = objective(b.coeffs, cfg)
    assert val == pytest.approx(residuals(b, 32).weighted_mse(), rel=1e-10)
    assert profile_objective(b, cfg) == pytest.approx(val, rel=1e-10)


def test_gradient_central_differences():
    cfg = DesignConfig(n_basis=12, samples_per_unit=32)
    rng = np.random.default_rng(3)
    p = rng.normal(0.3, 0.2, cfg.n_basis)
    _, g = objective(p, cfg)
    h = 1e-6
    fd = np.array([(objective(p + h * e, cfg)[0] - objective(p - h * e, cfg)[0]) / (2 * h)
                   for e in np.eye(cfg.n_basis)])
    assert np.linalg.norm(fd - g) <= 1e-6 * np.linalg.norm(g)
    with pytest.raises(ValueError):
        objective(np.zeros(3), cfg)


def test_design_reduces_objective_monotonically():
    cfg = DesignConfig(max_iters=40)
    res = design(None, cfg)
    vals = [v for _, v, _ in res.trace]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < vals[0] / 10
    assert res.status in ("converged", "max_iters", "stalled")
    assert isinstance(res.profile, SplineProfile)
    lines = res.trace_csv().splitlines()
    assert lines[0] == "iter,objective,step_size" and len(lines) == len(res.trace) + 1
    json.dumps(res.to_dict())


def test_design_statuses(meyer):
    assert design(meyer).status == "passthrough"
    tight = DesignConfig(support=(0.5, 2.5), max_iters=5)
    assert not support_feasible(tight.support)
    assert design(None, tight).status == "infeasible-support"
    assert support_feasible((0.25, 3.0))
    assert support_feasible((0.5, 1.0), degree=0)
    assert design(None, DesignConfig(max_iters=0)).status == "max_iters"


def test_config_validation():
    for bad in ({"support": (0.0, 1.0)}, {"support": (2.0, 1.0)}, {"n_basis": 0},
                {"mu": -1.0}, {"weights": (1.0, -1.0, 1.0)}, {"max_iters": -1}):
        with pytest.raises(ValueError):
            DesignConfig(**bad)


def test_midpoints():
    np.testing.assert_allclose(midpoints(0.0, 1.0, 4), [0.125, 0.375, 0.625, 0.875])
