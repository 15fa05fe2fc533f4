"""Bell profiles: the real, compactly supported restriction of the wavelet's
Fourier transform to the positive half-line.

Three families are provided:

* :func:`make_shannon` -- the indicator bell ``2**-0.5 * 1_[1, 2]``. Not smooth,
  but it solves the half-line orthonormality equations exactly and is used as
  the reference (oracle) profile throughout.
* :func:`make_meyer` -- the classical Meyer magnitude profile built from a
  polynomial ramp. Smooth up to the ramp order; used for the estimate layer.
* :func:`make_spline` / :class:`SplineProfile` -- B-spline profiles whose basis
  functions live strictly inside the support, so every derivative below the
  spline degree vanishes at both support endpoints.
"""

from __future__ import annotations

import math
import warnings
from math import comb, factorial

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import BSpline


class SmoothnessExceeded(UserWarning):
    """A derivative beyond the declared smoothness order was requested."""


class Ramp:
    """Polynomial smooth step ``nu`` of a given order.

    ``nu(t) = t**(N+1) * sum_i C(N+i, i) C(2N+1, N-i) (-t)**i`` clamped to 0 for
    ``t <= 0`` and to 1 for ``t >= 1``. Order 3 is the familiar
    ``t**4 (35 - 84 t + 70 t**2 - 20 t**3)``. The first ``N`` derivatives vanish
    at both ends and ``nu(t) + nu(1 - t) == 1``.
    """

    def __init__(self, order=3):
        if order < 0:
            raise ValueError("ramp order must be non-negative")
        self.order = int(order)
        n = self.order
        inner = [comb(n + i, i) * comb(2 * n + 1, n - i) * (-1) ** i for i in range(n + 1)]
        self.poly = Polynomial([0.0] * (n + 1) + inner)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.poly(np.clip(t, 0.0, 1.0))
        return np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, out))

    def derivative(self, m, t):
        if m == 0:
            return self(t)
        t = np.asarray(t, dtype=float)
        inside = (t > 0.0) & (t < 1.0)
        return np.where(inside, self.poly.deriv(m)(t), 0.0)


def _trig_of_poly_derivatives(theta: Polynomial, x, m, kind):
    """Return ``d^m/dx^m f(theta(x))`` for ``f`` = sin or cos, ``theta`` a polynomial.

    Uses truncated Taylor arithmetic: expand ``theta`` around ``x``, split off
    the constant term and compose with the sine/cosine series.
    """
    x = np.asarray(x, dtype=float)
    theta0 = theta(x)
    if m == 0:
        return np.sin(theta0) if kind == "sin" else np.cos(theta0)
    # h[i] = theta^{(i)}(x) / i!, i = 1..m
    h = np.zeros((m + 1,) + x.shape)
    d = theta
    for i in range(1, m + 1):
        d = d.deriv()
        h[i] = d(x) / factorial(i)

    def mul(a, b):
        out = np.zeros_like(a)
        for i in range(m + 1):
            out[i:] += a[i] * b[: m + 1 - i]
        return out

    sin_h = np.zeros_like(h)
    cos_h = np.zeros_like(h)
    cos_h[0] = 1.0
    power = np.zeros_like(h)
    power[0] = 1.0
    for p in range(1, m + 1):
        power = mul(power, h)
        sign = (-1) ** (p // 2)
        if p % 2:
            sin_h += sign * power / factorial(p)
        else:
            cos_h += sign * power / factorial(p)
    if kind == "sin":
        series = np.sin(theta0) * cos_h[m] + np.cos(theta0) * sin_h[m]
    else:
        series = np.cos(theta0) * cos_h[m] - np.sin(theta0) * sin_h[m]
    return factorial(m) * series


class BellProfile:
    """Base class. Subclasses implement ``_eval_inside(m, x)`` on the support."""

    kind = "abstract"

    def __init__(self, support_lo, support_hi, smoothness_order):
        if not support_lo > 0:
            raise ValueError("support must start at a positive frequency (R0 > 0)")
        if not support_hi > support_lo:
            raise ValueError("support_hi must exceed support_lo")
        self.support_lo = float(support_lo)
        self.support_hi = float(support_hi)
        self.smoothness_order = smoothness_order

    @property
    def support(self):
        return (self.support_lo, self.support_hi)

    @property
    def breakpoints(self):
        """Points where the profile is only piecewise smooth (support ends included)."""
        return (self.support_lo, self.support_hi)

    @property
    def bell_id(self):
        return self.kind

    def eval(self, x):
        return self.eval_derivative(0, x)

    def __call__(self, x):
        return self.eval(x)

    def eval_derivative(self, m, x):
        x = np.asarray(x, dtype=float)
        if m > self.smoothness_order:
            warnings.warn(
                f"{self.bell_id}: derivative of order {m} exceeds smoothness "
                f"order {self.smoothness_order}; returning zeros",
                SmoothnessExceeded,
                stacklevel=2,
            )
            return np.zeros_like(x)
        inside = (x >= self.support_lo) & (x <= self.support_hi)
        out = np.zeros_like(x)
        if np.any(inside):
            out[inside] = self._eval_inside(m, x[inside])
        return out

    def sup_norm(self, n, points=20001):
        """``max_{m <= n} sup |b^{(m)}|`` on a dense grid of the support (plus breakpoints)."""
        grid = np.union1d(np.linspace(self.support_lo, self.support_hi, points), self.breakpoints)
        return max(float(np.max(np.abs(self.eval_derivative(m, grid)))) for m in range(n + 1))

    def to_dict(self):
        raise NotImplementedError

    def _eval_inside(self, m, x):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(support=({self.support_lo:g}, {self.support_hi:g}))"


class ShannonProfile(BellProfile):
    kind = "shannon"

    def __init__(self):
        super().__init__(1.0, 2.0, 0)

    def _eval_inside(self, m, x):
        if m == 0:
            return np.full_like(x, 2.0**-0.5)
        return np.zeros_like(x)

    def to_dict(self):
        return {"kind": "shannon", "support": [1.0, 2.0], "knots": [], "values": []}


class MeyerProfile(BellProfile):
    """``sin(pi/2 nu(3x - 1))`` on [1/3, 2/3], ``cos(pi/2 nu(3x/2 - 1))`` on [2/3, 4/3].

    The profile is C^N across 1/3, 2/3 and 4/3 where N is the ramp order;
    higher derivatives are returned piecewise (one-sided at the junctions).
    """

    kind = "meyer"

    def __init__(self, ramp_order=3):
        self.ramp = Ramp(ramp_order)
        super().__init__(1.0 / 3.0, 4.0 / 3.0, ramp_order)
        self._phase = Polynomial([0.0, math.pi / 2])(self.ramp.poly)

    @property
    def bell_id(self):
        if self.ramp.order == 3:
            return "meyer"
        return f"meyer{self.ramp.order}"

    @property
    def breakpoints(self):
        return (1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0)

    def eval_derivative(self, m, x):
        # piecewise derivatives exist to any order; smoothness_order only
        # records the continuity class across the junctions
        x = np.asarray(x, dtype=float)
        inside = (x >= self.support_lo) & (x <= self.support_hi)
        out = np.zeros_like(x)
        if np.any(inside):
            out[inside] = self._eval_inside(m, x[inside])
        return out

    def _eval_inside(self, m, x):
        left = x < 2.0 / 3.0
        out = np.empty_like(x)
        if np.any(left):
            t = np.clip(3.0 * x[left] - 1.0, 0.0, 1.0)
            out[left] = 3.0**m * _trig_of_poly_derivatives(self._phase, t, m, "sin")
        if np.any(~left):
            # cos(pi/2 nu(t)) = sin(pi/2 nu(1 - t)); keeps the right end exactly 0
            t = np.clip(2.0 - 1.5 * x[~left], 0.0, 1.0)
            out[~left] = (-1.5) ** m * _trig_of_poly_derivatives(self._phase, t, m, "sin")
        return out

    def to_dict(self):
        return {
            "kind": "meyer",
            "support": [self.support_lo, self.support_hi],
            "ramp_order": self.ramp.order,
            "knots": [],
            "values": [],
        }


class SplineProfile(BellProfile):
    """Profile ``sum_i coeffs[i] B_i(x)`` on a simple-knot B-spline basis.

    ``knots`` is the full knot vector; its first and last entries are the
    support endpoints. Every basis function is supported inside
    ``[knots[0], knots[-1]]`` so the profile is C^(degree-1) on the whole line.
    """

    kind = "spline"

    def __init__(self, knots, coeffs, degree=3):
        knots = np.asarray(knots, dtype=float)
        coeffs = np.asarray(coeffs, dtype=float)
        if knots.ndim != 1 or np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if knots[0] <= 0:
            raise ValueError("support must start at a positive frequency (R0 > 0)")
        if coeffs.shape != (len(knots) - degree - 1,):
            raise ValueError(
                f"expected {len(knots) - degree - 1} coefficients for {len(knots)} knots "
                f"of degree {degree}, got {coeffs.shape}"
            )
        super().__init__(knots[0], knots[-1], degree - 1 if degree > 0 else 0)
        self.degree = int(degree)
        self.knots = knots
        self.coeffs = coeffs
        self._spline = BSpline(knots, coeffs, degree, extrapolate=False)
        self._derivs = {0: self._spline}

    @property
    def breakpoints(self):
        return tuple(self.knots)

    def eval_derivative(self, m, x):
        x = np.asarray(x, dtype=float)
        if m > self.degree:
            warnings.warn(
                f"spline of degree {self.degree} has no derivative of order {m}; returning zeros",
                SmoothnessExceeded,
                stacklevel=2,
            )
            return np.zeros_like(x)
        inside = (x >= self.support_lo) & (x <= self.support_hi)
        out = np.zeros_like(x)
        if np.any(inside):
            out[inside] = self._eval_inside(m, x[inside])
        return out

    def _eval_inside(self, m, x):
        if m not in self._derivs:
            self._derivs[m] = self._spline.derivative(m)
        return np.nan_to_num(self._derivs[m](x))

    def basis_matrix(self, x, m=0):
        """Dense matrix ``B[l, i] = B_i^{(m)}(x_l)`` (zero outside the support)."""
        return spline_basis_matrix(self.knots, self.degree, x, m)

    def with_coeffs(self, coeffs):
        return SplineProfile(self.knots, coeffs, self.degree)

    def to_dict(self):
        return {
            "kind": "spline",
            "support": [self.support_lo, self.support_hi],
            "degree": self.degree,
            "knots": self.knots.tolist(),
            "values": self.coeffs.tolist(),
        }


def spline_basis_matrix(knots, degree, x, m=0):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n_basis = len(knots) - degree - 1
    out = np.zeros((x.size, n_basis))
    inside = (x >= knots[0]) & (x <= knots[-1])
    if not np.any(inside):
        return out
    eye = np.eye(n_basis)
    for i in range(n_basis):
        spl = BSpline(knots, eye[i], degree, extrapolate=False)
        if m:
            spl = spl.derivative(m)
        out[inside, i] = np.nan_to_num(spl(x[inside]))
    return out


def make_shannon():
    """Indicator bell ``2**-0.5`` on [1, 2]."""
    return ShannonProfile()


def make_meyer(ramp_order=3):
    """Meyer magnitude bell on [1/3, 4/3].

    ``ramp_order=3`` uses the degree-7 ramp; larger orders give profiles that
    are C^ramp_order across the junctions.
    """
    return MeyerProfile(ramp_order)


def uniform_knots(support, n_basis, degree=3):
    """Simple knot vector with ``n_basis`` interior-supported basis functions."""
    lo, hi = support
    return np.linspace(lo, hi, n_basis + degree + 1)


def make_spline(control, support, degree=3, n_basis=None):
    """Spline profile fitted through ``control = [(knot, value), ...]``.

    The basis has ``n_basis`` (default ``len(control)``) functions on a uniform
    simple-knot vector over ``support``; coefficients solve the collocation
    system in the least-squares sense.
    """
    lo, hi = support
    if lo <= 0:
        raise ValueError("support must start at a positive frequency (R0 > 0)")
    if hi <= lo:
        raise ValueError("support_hi must exceed support_lo")
    pts = np.asarray([c[0] for c in control], dtype=float)
    vals = np.asarray([c[1] for c in control], dtype=float)
    if pts.size and np.any(np.diff(pts) <= 0):
        raise ValueError("control knots must be strictly increasing")
    if pts.size and (pts[0] < lo or pts[-1] > hi):
        raise ValueError("control knots must lie inside the support")
    n_basis = int(n_basis or max(len(control), 1))
    knots = uniform_knots(support, n_basis, degree)
    if not pts.size or not np.any(vals):
        return SplineProfile(knots, np.zeros(n_basis), degree)
    design = spline_basis_matrix(knots, degree, pts)
    coeffs, *_ = np.linalg.lstsq(design, vals, rcond=None)
    return SplineProfile(knots, coeffs, degree)


def mollified_shannon(support=(0.25, 3.0), n_basis=20, degree=3, samples=400):
    """Spline least-squares fit of the Shannon bell on a wider support."""
    lo, hi = support
    x = np.linspace(lo, hi, samples)
    shannon = make_shannon()
    return make_spline(list(zip(x, shannon(x))), support, degree=degree, n_basis=n_basis)


def profile_from_dict(data):
    kind = data["kind"]
    if kind == "shannon":
        return make_shannon()
    if kind == "meyer":
        return make_meyer(data.get("ramp_order", 3))
    if kind == "spline":
        return SplineProfile(data["knots"], data["values"], data.get("degree", 3))
    raise ValueError(f"unknown profile kind {kind!r}")


def get_profile(name):
    """Resolve ``'shannon'``, ``'meyer'``, ``'meyerN'`` or a profile instance."""
    if isinstance(name, BellProfile):
        return name
    if name == "shannon":
        return make_shannon()
    if name == "meyer":
        return make_meyer()
    if isinstance(name, str) and name.startswith("meyer") and name[5:].isdigit():
        return make_meyer(int(name[5:]))
    raise ValueError(f"unknown bell {name!r}")
