"""Least-squares search for bells whose half-line system is orthonormal and complete.

For a real profile ``b`` on ``[R0, R1]`` the system ``psi_{j,k}`` is an
orthonormal basis of ``L^2(0, inf)`` iff three residuals vanish:

``A(u) = 2 sum_l b(u + l)^2 - 1`` on ``[0, 1)``
    same-scale Gram deviations are its Fourier coefficients;
``B_r(u) = sum_l b(u + 2^r l) b((u + 2^r l) / 2^r)`` on ``[0, 2^r)``
    cross-scale Gram entries at scale distance ``r >= 1`` are its Fourier
    coefficients (times ``2^{1 - r/2}``); ``r > log2(R1 / R0)`` is void;
``C(u) = sum_j b(u / 2^j)^2 - 1/2`` on one octave
    the Parseval identity.

See ``docs/orthonormality_conditions.md`` for the derivation and the
support regimes where smooth solutions are excluded.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bells import SplineProfile, mollified_shannon, spline_basis_matrix, uniform_knots
from .quadrature import QuadSpec, integrate


def r_max(b):
    """Largest scale distance with overlapping supports, ``floor(log2(R1 / R0))``."""
    return int(math.floor(math.log2(b.support_hi / b.support_lo) + 1e-12))


def midpoints(lo, hi, count):
    return lo + (np.arange(count) + 0.5) * (hi - lo) / count


def _shifts(lo, hi, period, u_lo, u_hi):
    # integers l with [u_lo + period l, u_hi + period l] meeting [lo, hi]
    return range(math.floor((lo - u_hi) / period), math.ceil((hi - u_lo) / period) + 1)


def _scales_for(lo, hi, u_lo, u_hi):
    # every j with [u_lo, u_hi] / 2^j meeting [lo, hi], plus a guard scale each side
    return range(math.floor(math.log2(u_lo / hi)) - 1, math.ceil(math.log2(u_hi / lo)) + 2)


# residual functions ------------------------------------------------------------------


def residual_A(b, u):
    u = np.asarray(u, dtype=float)
    total = np.zeros_like(u)
    for ell in _shifts(b.support_lo, b.support_hi, 1.0, 0.0, 1.0):
        x = u + ell
        ok = x > 0
        total[ok] += b.eval(x[ok]) ** 2
    return 2.0 * total - 1.0


def residual_B(b, r, u):
    u = np.asarray(u, dtype=float)
    period = 2.0**r
    total = np.zeros_like(u)
    for ell in _shifts(b.support_lo * period, b.support_hi, period, 0.0, period):
        x = u + period * ell
        ok = x > 0
        total[ok] += b.eval(x[ok]) * b.eval(x[ok] / period)
    return total


def residual_C(b, u):
    u = np.asarray(u, dtype=float)
    total = np.zeros_like(u)
    for j in _scales_for(b.support_lo, b.support_hi, float(np.min(u)), float(np.max(u))):
        total += b.eval(u / 2.0**j) ** 2
    return total - 0.5


@dataclass
class ResidualVector:
    """Sampled residuals on midpoint grids: ``A`` on [0, 1), ``B[r-1]`` on [0, 2^r), ``C`` on [1, 2)."""

    A: np.ndarray
    B: list
    C: np.ndarray
    samples_per_unit: int
    grids: dict = field(default_factory=dict)

    @property
    def r_max(self):
        return len(self.B)

    def max_abs(self):
        parts = [np.max(np.abs(self.A)), np.max(np.abs(self.C))]
        parts += [np.max(np.abs(b)) for b in self.B if b.size]
        return float(max(parts))

    def norms(self):
        return {"A": float(np.max(np.abs(self.A))),
                "B": [float(np.max(np.abs(b))) for b in self.B],
                "C": float(np.max(np.abs(self.C)))}

    def weighted_mse(self, weights=(1.0, 1.0, 1.0)):
        wa, wb, wc = weights
        val = wa * float(np.mean(self.A**2)) + wc * float(np.mean(self.C**2))
        if self.B:
            val += wb * float(np.mean(np.concatenate(self.B) ** 2))
        return val

    def to_dict(self):
        return {"samples_per_unit": self.samples_per_unit, "norms": self.norms(),
                "A": self.A.tolist(), "B": [b.tolist() for b in self.B], "C": self.C.tolist()}


def residuals(b, samples_per_unit=64):
    """Residuals of ``b`` on midpoint grids (so grid points avoid dyadic block edges)."""
    n = int(samples_per_unit)
    uA = midpoints(0.0, 1.0, n)
    uC = midpoints(1.0, 2.0, n)
    Bs = []
    for r in range(1, r_max(b) + 1):
        Bs.append(residual_B(b, r, midpoints(0.0, 2.0**r, n * 2**r)))
    return ResidualVector(residual_A(b, uA), Bs, residual_C(b, uC), n)


def implied_gram(b, window, spec=QuadSpec()):
    """Gram matrix of the window built only from the residual functions A and B_r.

    ``G[(j,k),(j,k')] = delta + int_0^1 A(u) e^{-2 pi i (k - k') u} du`` and for
    ``r = j - j' >= 1``, ``G[(j,k),(j',k')] = 2^{1 - r/2} int_0^{2^r} B_r(u)
    e^{-2 pi i (k - 2^r k') u / 2^r} du``.
    """
    js = [int(j) for j in window.js]
    ks = window.ks
    nk = len(ks)
    size = len(js) * nk
    G = np.eye(size, dtype=complex)
    kmax = window.k_max
    breaks_A = _periodic_breaks(b, 1.0)
    mA = np.arange(-2 * kmax, 2 * kmax + 1)
    hatA = integrate(lambda u: residual_A(b, u)[None, :] * np.exp(-2j * np.pi * np.multiply.outer(mA, u)),
                     (0.0, 1.0), 2 * kmax, spec, breaks_A).value
    rmax = r_max(b)
    hatB = {}
    for r in range(1, min(rmax, js[-1] - js[0]) + 1):
        period = 2.0**r
        m = np.arange(-(kmax + int(period) * kmax), kmax + int(period) * kmax + 1)
        val = integrate(lambda u: residual_B(b, r, u)[None, :]
                        * np.exp(-2j * np.pi * np.multiply.outer(m, u) / period),
                        (0.0, period), float(np.max(np.abs(m))) / period, spec,
                        _periodic_breaks(b, period, dilate=period)).value
        hatB[r] = (m, 2.0 ** (1 - r / 2.0) * val)
    for a, j in enumerate(js):
        for c, jp in enumerate(js):
            blk = (slice(a * nk, (a + 1) * nk), slice(c * nk, (c + 1) * nk))
            r = j - jp
            if r == 0:
                G[blk] += hatA[np.subtract.outer(ks, ks) + 2 * kmax]
            elif 0 < r <= rmax:
                m, vals = hatB[r]
                idx = np.subtract.outer(ks, 2**r * ks) - m[0]
                G[blk] = vals[idx]
            elif -rmax <= r < 0:
                m, vals = hatB[-r]
                idx = np.subtract.outer(ks, 2 ** (-r) * ks) - m[0]
                G[blk] = np.conj(vals[idx]).T
    return G


def _periodic_breaks(b, period, dilate=None):
    pts = list(b.breakpoints)
    if dilate:
        pts += [dilate * p for p in b.breakpoints]
    out = set()
    for p in pts:
        q = p % period
        if 0 < q < period:
            out.add(q)
    return sorted(out)


# spline problem ------------------------------------------------------------------------


@dataclass(frozen=True)
class DesignConfig:
    """Designer settings; ``weights`` are for the A, B and C residuals."""

    support: tuple = (0.25, 3.0)
    n_basis: int = 20
    degree: int = 3
    weights: tuple = (1.0, 1.0, 1.0)
    mu: float = 1e-4
    max_iters: int = 200
    samples_per_unit: int = 64

    def __post_init__(self):
        lo, hi = self.support
        if not 0 < lo < hi:
            raise ValueError("support must satisfy 0 < R0 < R1")
        if self.n_basis < 1 or self.degree < 0:
            raise ValueError("need n_basis >= 1 and degree >= 0")
        if self.mu < 0 or min(self.weights) < 0:
            raise ValueError("weights and mu must be non-negative")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")

    @property
    def knots(self):
        return uniform_knots(self.support, self.n_basis, self.degree)

    def to_dict(self):
        return {"support": list(self.support), "n_basis": self.n_basis, "degree": self.degree,
                "weights": list(self.weights), "mu": self.mu, "max_iters": self.max_iters,
                "samples_per_unit": self.samples_per_unit}


class _SplineProblem:
    """Basis matrices for every shifted or dilated grid, so residuals are quadratic forms."""

    def __init__(self, cfg: DesignConfig):
        self.cfg = cfg
        knots = cfg.knots
        self.knots = knots
        lo, hi = cfg.support
        n = cfg.samples_per_unit
        deg = cfg.degree

        def stack(points_list):
            return np.stack([spline_basis_matrix(knots, deg, p) for p in points_list])

        uA = midpoints(0.0, 1.0, n)
        self.NA = stack([uA + ell for ell in _shifts(lo, hi, 1.0, 0.0, 1.0)])
        self.NB = []
        rm = int(math.floor(math.log2(hi / lo) + 1e-12))
        for r in range(1, rm + 1):
            period = 2.0**r
            u = midpoints(0.0, period, n * 2**r)
            xs = [u + period * ell for ell in _shifts(lo * period, hi, period, 0.0, period)]
            self.NB.append((stack(xs), stack([x / period for x in xs])))
        uC = midpoints(1.0, 2.0, n)
        self.NC = stack([uC / 2.0**j for j in _scales_for(lo, hi, 1.0, 2.0)])
        # exact Gauss-Legendre for int (b'')^2 on each knot span
        if deg >= 2:
            t, w = np.polynomial.legendre.leggauss(max(deg, 2))
            mids = 0.5 * (knots[1:] + knots[:-1])
            half = 0.5 * np.diff(knots)
            xq = (mids[:, None] + half[:, None] * t[None, :]).ravel()
            wq = (half[:, None] * w[None, :]).ravel()
            self.D2 = spline_basis_matrix(knots, deg, xq, 2)
            self.wq = wq
        else:
            self.D2 = np.zeros((0, cfg.n_basis))
            self.wq = np.zeros(0)
        self.count_A = self.NA.shape[1]
        self.count_B = sum(nb[0].shape[1] for nb in self.NB)
        self.count_C = self.NC.shape[1]

    def residual_parts(self, c):
        bA = self.NA @ c
        A = 2.0 * np.sum(bA**2, axis=0) - 1.0
        JA = 4.0 * np.einsum("li,lip->ip", bA, self.NA)
        Bs, JBs = [], []
        for Nx, Nxs in self.NB:
            bx, bxs = Nx @ c, Nxs @ c
            Bs.append(np.sum(bx * bxs, axis=0))
            JBs.append(np.einsum("li,lip->ip", bxs, Nx) + np.einsum("li,lip->ip", bx, Nxs))
        bC = self.NC @ c
        C = np.sum(bC**2, axis=0) - 0.5
        JC = 2.0 * np.einsum("li,lip->ip", bC, self.NC)
        return (A, JA), (Bs, JBs), (C, JC)

    def stacked(self, c):
        """Residual vector ``r`` and Jacobian ``J`` with ``objective = |r|^2``."""
        wa, wb, wc = self.cfg.weights
        (A, JA), (Bs, JBs), (C, JC) = self.residual_parts(c)
        sa = math.sqrt(wa / self.count_A)
        sc = math.sqrt(wc / self.count_C)
        rows = [sa * A, sc * C]
        jacs = [sa * JA, sc * JC]
        if Bs:
            sb = math.sqrt(wb / self.count_B)
            rows.append(sb * np.concatenate(Bs))
            jacs.append(sb * np.concatenate(JBs))
        if self.wq.size:
            sr = np.sqrt(self.cfg.mu * self.wq)
            rows.append(sr * (self.D2 @ c))
            jacs.append(sr[:, None] * self.D2)
        return np.concatenate(rows), np.concatenate(jacs)


@lru_cache(maxsize=8)
def _problem(cfg):
    return _SplineProblem(cfg)


def objective(params, config=DesignConfig()):
    """Weighted mean-square residual plus ``mu int b''^2`` and its analytic gradient."""
    c = np.asarray(params, dtype=float)
    if c.shape != (config.n_basis,):
        raise ValueError(f"expected {config.n_basis} parameters, got {c.shape}")
    r, J = _problem(config).stacked(c)
    return float(r @ r), 2.0 * (J.T @ r)


def profile_objective(b, config=DesignConfig()):
    """Objective of an arbitrary profile, from :func:`residuals` (regulariser skipped below C^2)."""
    res = residuals(b, config.samples_per_unit)
    val = res.weighted_mse(config.weights)
    if b.smoothness_order >= 2 and config.mu > 0:
        pts = sorted(set(b.breakpoints) | {b.support_lo, b.support_hi})
        q = integrate(lambda x: b.eval_derivative(2, x) ** 2, (pts[0], pts[-1]), 0.0,
                      QuadSpec(tol=1e-10), pts)
        val += config.mu * float(np.real(q.value))
    return val


# optimiser -----------------------------------------------------------------------------


def support_feasible(support, degree=3, weights=(1.0, 1.0, 1.0)):
    """``False`` when a continuous profile cannot satisfy B and C on ``support``.

    One octave (``R1 <= 2 R0``) forces ``b^2 = 1/2`` on the whole support.
    For ``2 R0 < R1 <= 2 R0 + 2`` the translates in ``B_1`` do not overlap, so
    ``B_1 = 0`` forces ``b(x) b(x/2) = 0`` pointwise and C again needs a jump.
    """
    lo, hi = support
    if degree < 1 or weights[2] == 0:
        return True
    return hi > 2 * lo + 2


@dataclass
class DesignResult:
    profile: object
    trace: list
    status: str
    residuals: ResidualVector
    config: DesignConfig

    def trace_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "objective", "step_size"])
        for it, val, step in self.trace:
            w.writerow([it, repr(float(val)), repr(float(step))])
        return buf.getvalue()

    def to_dict(self):
        return {"status": self.status, "config": self.config.to_dict(),
                "profile": self.profile.to_dict(),
                "trace": [{"iter": i, "objective": v, "step_size": s} for i, v, s in self.trace],
                "residual_norms": self.residuals.norms()}


def _initial_coeffs(init, cfg):
    if isinstance(init, SplineProfile) and init.degree == cfg.degree \
            and np.allclose(init.knots, cfg.knots):
        return init.coeffs.copy()
    if isinstance(init, SplineProfile):
        x = np.linspace(*cfg.support, 40 * cfg.n_basis)
        coeffs, *_ = np.linalg.lstsq(spline_basis_matrix(cfg.knots, cfg.degree, x), init(x),
                                     rcond=None)
        return coeffs
    return None


def design(init=None, config=DesignConfig(), grad_tol=1e-12, rel_tol=1e-14):
    """Levenberg-Marquardt on the stacked residuals, gradient descent as fallback.

    Only decreasing steps are accepted, so the trace is non-increasing.
    Non-spline initial profiles are returned unchanged with status
    ``"passthrough"``; supports excluded by :func:`support_feasible` give
    ``"infeasible-support"``.
    """
    cfg = config
    if init is None:
        init = mollified_shannon(cfg.support, cfg.n_basis, cfg.degree)
    if not isinstance(init, SplineProfile):
        val = profile_objective(init, cfg)
        return DesignResult(init, [(0, val, 0.0)], "passthrough",
                            residuals(init, cfg.samples_per_unit), cfg)
    c = _initial_coeffs(init, cfg)
    profile = SplineProfile(cfg.knots, c, cfg.degree)
    val, _ = objective(c, cfg)
    trace = [(0, val, 0.0)]
    if not support_feasible(cfg.support, cfg.degree, cfg.weights):
        return DesignResult(profile, trace, "infeasible-support",
                            residuals(profile, cfg.samples_per_unit), cfg)
    problem = _problem(cfg)
    damping = 1e-3
    status = "max_iters"
    for it in range(1, cfg.max_iters + 1):
        r, J = problem.stacked(c)
        grad = 2.0 * (J.T @ r)
        if float(np.linalg.norm(grad)) <= grad_tol:
            status = "converged"
            break
        JtJ = J.T @ J
        accepted = False
        for _ in range(12):
            step = np.linalg.solve(JtJ + damping * np.diag(np.diag(JtJ) + 1e-12), -(J.T @ r))
            trial, _ = objective(c + step, cfg)
            if trial < val:
                accepted = True
                damping = max(damping / 3.0, 1e-12)
                break
            damping *= 10.0
        if not accepted:
            # steepest descent with Armijo backtracking
            t = 1.0
            gnorm2 = float(grad @ grad)
            while t > 1e-16:
                step = -t * grad
                trial, _ = objective(c + step, cfg)
                if trial <= val - 1e-4 * t * gnorm2 and trial < val:
                    accepted = True
                    break
                t *= 0.5
        if not accepted:
            status = "stalled"
            break
        c = c + step
        drop = val - trial
        val = trial
        trace.append((it, val, float(np.linalg.norm(step))))
        if drop <= rel_tol * max(val, 1e-300):
            status = "converged"
            break
    profile = SplineProfile(cfg.knots, c, cfg.degree)
    return DesignResult(profile, trace, status, residuals(profile, cfg.samples_per_unit), cfg)
