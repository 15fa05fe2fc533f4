"""Weighted sup-norms: ``omega_lambda``, ``X_{lambda,n}``, ``Y_{lambda,n}``, ``s^n``, ``C^n_K``.

Sup-norms over (0, inf) are grid maxima on a logarithmic grid ``x = 2**t``,
``|t| <= T``. A norm is declared divergent when the weighted profile still
grows from the second-outermost octave to the outermost one, on either side.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .functions import InsufficientSmoothness


def weight(lam, x):
    """``omega_lambda(x) = max(x, 1/x) ** lambda``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("omega_lambda is defined for x > 0")
    return np.maximum(x, 1.0 / x) ** lam


def log_weight2(lam, x):
    """``log2 omega_lambda(x) = lambda |log2 x|`` (overflow-free)."""
    return lam * np.abs(np.log2(x))


@dataclass(frozen=True)
class NormValue:
    """A grid sup: ``finite`` with its value, or ``divergent`` with growth evidence.

    ``slope`` is the fitted ``d log2(profile) / d|t|`` over the outer two octaves
    of the worst side (``inf`` when the profile overflows).
    """

    status: str
    value: float
    slope: float = 0.0
    side: str = ""

    @property
    def finite(self):
        return self.status == "finite"


def log_grid(T=20, points_per_octave=64):
    t = np.linspace(-T, T, 2 * T * points_per_octave + 1)
    return t, 2.0**t


def _profile(phi, lam, n, x):
    """``max_{m <= n} omega_lam(x) x^m |phi^{(m)}(x)|`` with non-finite values mapped to inf."""
    logw = log_weight2(lam, x)
    best = np.zeros_like(x)
    with np.errstate(all="ignore"):
        for m in range(n + 1):
            d = np.abs(phi.eval_derivative(m, x))
            val = np.exp2(logw + m * np.log2(x)) * d
            val = np.where(d == 0, 0.0, val)
            val = np.where(np.isfinite(val), val, np.inf)
            best = np.maximum(best, val)
    return best


def _side_growth(t, prof, side, T, growth_tol):
    if side == "right":
        outer = (t >= T - 1)
        inner = (t >= T - 2) & (t < T - 1)
        fit = t >= T - 2
    else:
        outer = (t <= -T + 1)
        inner = (t <= -T + 2) & (t > -T + 1)
        fit = t <= -T + 2
    o = float(np.max(prof[outer]))
    i = float(np.max(prof[inner]))
    if math.isinf(o) or math.isinf(i):
        return True, math.inf
    if o == 0.0:
        return False, -math.inf
    if i == 0.0:
        return True, math.inf
    growing = math.log2(o) - math.log2(i) > growth_tol
    y = prof[fit]
    keep = y > 0
    if np.count_nonzero(keep) >= 2:
        slope = float(np.polyfit(np.abs(t[fit][keep]), np.log2(y[keep]), 1)[0])
    else:
        slope = math.log2(o) - math.log2(i)
    return growing, slope


def x_norm(phi, lam, n, T=20, points_per_octave=64, growth_tol=0.05, grid=None):
    """``max_{m <= n} sup_x omega_lam(x) x^m |phi^{(m)}(x)|`` on a log grid.

    Raises :class:`InsufficientSmoothness` if ``phi`` lacks derivatives up to ``n``.
    ``grid`` overrides the default grid with explicit abscissae; divergence is
    then not assessed.
    """
    if n > getattr(phi, "n_max", n) and getattr(phi, "has_regular_part", True):
        raise InsufficientSmoothness(f"insufficient smoothness: need n={n}, have {phi.n_max}")
    if grid is not None:
        prof = _profile(phi, lam, n, np.asarray(grid, dtype=float))
        value = float(np.max(prof))
        return NormValue("finite" if math.isfinite(value) else "divergent", value,
                         0.0 if math.isfinite(value) else math.inf)
    t, x = log_grid(T, points_per_octave)
    prof = _profile(phi, lam, n, x)
    verdicts = {side: _side_growth(t, prof, side, T, growth_tol) for side in ("left", "right")}
    diverging = [s for s, (g, _) in verdicts.items() if g]
    value = float(np.max(prof))
    if diverging:
        side = max(diverging, key=lambda s: verdicts[s][1])
        return NormValue("divergent", value, verdicts[side][1], side)
    return NormValue("finite", value, max(v[1] for v in verdicts.values()))


def y_norm(c, lam, n):
    """``sup_{(j,k) in window} 2^{lam |j|} (1 + |k|)^n |c_{j,k}|``."""
    js = np.abs(c.window.js)[:, None].astype(float)
    ks = np.abs(c.window.ks)[None, :].astype(float)
    mags = np.abs(c.values)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.exp2(lam * js + n * np.log2(1.0 + ks)) * mags
    vals = np.where(mags == 0, 0.0, vals)
    return float(np.max(vals)) if vals.size else 0.0


def s_norm(row, n, ks=None):
    """``sup_k (1 + |k|)^n |c_k|``; ``row`` is centred at ``k = 0`` unless ``ks`` is given."""
    row = np.asarray(row)
    if ks is None:
        half = (len(row) - 1) // 2
        ks = np.arange(-half, len(row) - half)
    vals = (1.0 + np.abs(np.asarray(ks, dtype=float))) ** n * np.abs(row)
    return float(np.max(vals)) if vals.size else 0.0


def cn_seminorm(phi, K, n, points_per_unit=256):
    """``max_{m <= n} sup_{x in K} |phi^{(m)}(x)|`` on a uniform grid plus breakpoints."""
    lo, hi = K
    count = max(2, int(math.ceil(points_per_unit * (hi - lo))) + 1)
    grid = np.linspace(lo, hi, count)
    extra = [p for p in getattr(phi, "breakpoints", ()) if lo <= p <= hi]
    if extra:
        grid = np.union1d(grid, extra)
    best = 0.0
    with np.errstate(all="ignore"):
        for m in range(n + 1):
            vals = np.abs(phi.eval_derivative(m, grid))
            top = float(np.max(vals))
            best = max(best, top if math.isfinite(top) else math.inf)
    return best


@dataclass
class NormSweep:
    """``(lam, n) -> NormValue`` over a grid."""

    entries: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries[key]

    def __setitem__(self, key, value):
        self.entries[key] = value

    def items(self):
        return sorted(self.entries.items())

    @property
    def lams(self):
        return sorted({lam for lam, _ in self.entries})

    @property
    def ns(self):
        return sorted({n for _, n in self.entries})

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["lambda", "n", "status", "value_or_slope"])
        for (lam, n), v in self.items():
            writer.writerow([repr(float(lam)), int(n), v.status,
                             repr(v.value if v.finite else v.slope)])
        return buf.getvalue()

    def to_records(self):
        return [{"lambda": lam, "n": n, "status": v.status, "value": v.value, "slope": v.slope}
                for (lam, n), v in self.items()]


def x_sweep(phi, lams, ns, **kwargs):
    sweep = NormSweep()
    for n in ns:
        for lam in lams:
            sweep[(float(lam), int(n))] = x_norm(phi, lam, n, **kwargs)
    return sweep
