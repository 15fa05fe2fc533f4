"""Functions and simple distributions on (0, inf) with derivative evaluators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InsufficientSmoothness(ValueError):
    """A derivative beyond the available order was requested."""


@dataclass(frozen=True)
class PointMass:
    """``weight * (d/dx)^order delta_location``; pairs as ``(-1)^order weight conj(phi^{(order)})(location)``."""

    location: float
    order: int = 0
    weight: complex = 1.0

    def __post_init__(self):
        if self.location <= 0:
            raise ValueError("point masses must sit inside (0, inf)")
        if not 0 <= self.order <= 4:
            raise ValueError("point-mass derivative order must be in 0..4")


class SampledFunction:
    """A locally integrable function plus a finite sum of point masses.

    Parameters
    ----------
    func : callable or None
        Vectorised evaluator of the regular part. ``None`` for a pure
        point-mass distribution.
    derivative : callable ``(m, x) -> array`` or None
        Derivatives of the regular part for ``1 <= m <= n_max``.
    n_max : int
        Highest available derivative order.
    support : (float, float)
        Closed interval containing the support of the regular part;
        ``(0, inf)`` when unknown.
    breakpoints : sequence of float
        Points where the regular part is not smooth (jumps, kinks).
    point_masses : sequence of PointMass
    real : bool
        Whether the regular part is real valued.
    """

    def __init__(self, func=None, derivative=None, n_max=0, support=(0.0, math.inf),
                 breakpoints=(), point_masses=(), real=True, name=""):
        self.func = func
        self.derivative = derivative
        self.n_max = int(n_max) if func is not None else 0
        self.support = (float(support[0]), float(support[1]))
        self.breakpoints = tuple(sorted(float(p) for p in breakpoints))
        self.point_masses = tuple(point_masses)
        self.real = bool(real) and all(np.isreal(pm.weight) for pm in self.point_masses)
        self.name = name

    @property
    def descriptor(self):
        if self.func is None:
            return "point_mass"
        if self.point_masses:
            return "mixed"
        return "piecewise" if self.breakpoints or self.n_max == 0 else "smooth"

    @property
    def has_regular_part(self):
        return self.func is not None

    @property
    def compact_support(self):
        """Closed interval in (0, inf) containing everything, or None."""
        lo, hi = self.support
        locs = [pm.location for pm in self.point_masses]
        if self.func is not None and not (lo > 0 and math.isfinite(hi)):
            return None
        if self.func is None and not locs:
            return None
        lows = ([lo] if self.func is not None else []) + locs
        highs = ([hi] if self.func is not None else []) + locs
        return (min(lows), max(highs))

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        if self.func is None:
            return np.zeros_like(x)
        return np.asarray(self.func(x))

    __call__ = eval

    def eval_derivative(self, m, x):
        if m == 0:
            return self.eval(x)
        if self.func is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        if m > self.n_max or self.derivative is None:
            raise InsufficientSmoothness(
                f"{self.name or 'function'}: derivative of order {m} unavailable "
                f"(n_max={self.n_max})"
            )
        return np.asarray(self.derivative(m, np.asarray(x, dtype=float)))

    # linear structure -------------------------------------------------

    def __mul__(self, alpha):
        if not np.isscalar(alpha):
            return NotImplemented
        func = None if self.func is None else (lambda x, f=self.func: alpha * f(x))
        deriv = None if self.derivative is None else \
            (lambda m, x, d=self.derivative: alpha * d(m, x))
        pms = [PointMass(pm.location, pm.order, alpha * pm.weight) for pm in self.point_masses]
        return SampledFunction(func, deriv, self.n_max, self.support, self.breakpoints, pms,
                               self.real and np.isreal(alpha), name=f"{alpha}*{self.name}")

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, SampledFunction):
            return NotImplemented
        funcs = [f for f in (self.func, other.func) if f is not None]
        func = None
        if funcs:
            def func(x):
                return sum(np.asarray(f(x)) for f in funcs)
        n_max = min(s.n_max for s in (self, other) if s.func is not None) if funcs else 0

        def deriv(m, x):
            return sum(s.eval_derivative(m, x) for s in (self, other) if s.func is not None)

        regular = [s for s in (self, other) if s.func is not None]
        if regular:
            support = (min(s.support[0] for s in regular), max(s.support[1] for s in regular))
        else:
            support = self.support
        return SampledFunction(func, deriv, n_max, support,
                               self.breakpoints + other.breakpoints,
                               self.point_masses + other.point_masses,
                               self.real and other.real,
                               name=f"({self.name}+{other.name})")

    def dilate(self, factor):
        """``x -> f(factor * x)`` (regular part only)."""
        if self.point_masses:
            raise ValueError("dilation of point masses is not supported")
        f, d = self.func, self.derivative
        deriv = None if d is None else (lambda m, x: factor**m * d(m, factor * x))
        return SampledFunction(lambda x: f(factor * x), deriv, self.n_max,
                               (self.support[0] / factor, self.support[1] / factor),
                               [p / factor for p in self.breakpoints], (), self.real,
                               name=f"{self.name}({factor}x)")

    def __repr__(self):
        return f"SampledFunction({self.name or self.descriptor})"


def point_mass(location, order=0, weight=1.0):
    return SampledFunction(point_masses=[PointMass(location, order, weight)],
                           name=f"delta^{order}_{location}")


def zero_function():
    return SampledFunction(lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                           lambda m, x: np.zeros_like(np.asarray(x, dtype=float)),
                           n_max=64, support=(1.0, 2.0), name="zero")


def indicator(a, b):
    """``1_[a, b]``."""
    def func(x):
        x = np.asarray(x, dtype=float)
        return ((x >= a) & (x <= b)).astype(float)
    return SampledFunction(func, None, 0, (a, b), (a, b), name=f"1_[{a},{b}]")


def polynomial_window(coeffs, a, b):
    """``p(x) 1_[a, b]`` with ``p`` given by ascending coefficients."""
    poly = np.polynomial.Polynomial(coeffs)

    def func(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= a) & (x <= b), poly(x), 0.0)

    def deriv(m, x):
        x = np.asarray(x, dtype=float)
        return np.where((x > a) & (x < b), poly.deriv(m)(x), 0.0)

    return SampledFunction(func, deriv, 64, (a, b), (a, b), name=f"poly_window[{a},{b}]")


def from_callable(func, derivative=None, n_max=0, support=(0.0, math.inf), breakpoints=(),
                  real=True, name=""):
    return SampledFunction(func, derivative, n_max, support, breakpoints, (), real, name)


def from_samples(x, y):
    """Piecewise-linear interpolant of samples (zero outside the sample range)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    order = np.argsort(x)
    x, y = x[order], y[order]
    if x[0] <= 0:
        raise ValueError("sample abscissae must be positive")

    def func(t):
        t = np.asarray(t, dtype=float)
        if np.iscomplexobj(y):
            val = np.interp(t, x, y.real) + 1j * np.interp(t, x, y.imag)
        else:
            val = np.interp(t, x, y)
        return np.where((t >= x[0]) & (t <= x[-1]), val, 0.0)

    return SampledFunction(func, None, 0, (x[0], x[-1]), (x[0], x[-1]),
                           real=not np.iscomplexobj(y), name="samples")
