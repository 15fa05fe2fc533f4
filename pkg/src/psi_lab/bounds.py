"""Explicit-constant checks of the coefficient and synthesis estimates.

Constants (``psi = sqrt(2) b``, ``K = [R0, R1]``, ``L = R1 - R0``):

``lemma1_constant``
    Integrating by parts ``n`` times in ``u = x / 2^j`` gives
    ``|k|^n |c_{j,k}| <= 2^n L ||psi||_{C^n_K} / (2 pi)^n * N_j`` and the
    ``k = 0`` estimate ``|c_{j,k}| <= L ||psi||_{C^0} N_j`` with
    ``N_j = 2^{j/2} ||phi(2^j .)||_{C^n_K}``. Since
    ``(1 + |k|)^n <= 2^n (1 + |k|^n)`` the sum of both, times ``2^n``, is a
    valid constant; the extra summand ``1`` in the bracket is slack.
``lemma2_constant``
    ``|psi_{j,k}^{(m)}| <= 2^{-j/2} 2^{-jm} (2 pi)^m (1 + |k|)^m ||psi||_{C^m}``
    and ``sum_k (1 + |k|)^{-2} <= pi^2 / 3``.
``isoxy_constant_a`` / ``isoxy_constant_b``
    The two estimates above combined with
    ``omega_lam(x y) <= omega_lam(x) omega_|lam|(y)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import basis, seminorms
from ._parallel import ordered_map
from .basis import IndexWindow
from .functions import InsufficientSmoothness, SampledFunction
from .quadrature import QuadSpec
from .transform import CoeffArray, analyze, l2_norm_squared, synthesize, synthesized_function


@dataclass
class BoundReport:
    """One inequality check: ``ratio <= C_explicit`` with ``margin = C_explicit - ratio``.

    ``status`` is ``"ok"``, ``"violated"``, ``"vacuous"`` (source norm
    divergent) or ``"refused"`` (preconditions not met).
    """

    check: str
    n: int
    C_explicit: float
    ratio: float
    lam: float | None = None
    status: str = "ok"
    probes: dict = field(default_factory=dict)

    @property
    def margin(self):
        if self.status in ("vacuous", "refused"):
            return math.inf
        return self.C_explicit - self.ratio

    @property
    def passed(self):
        return self.status in ("ok", "vacuous") and self.margin >= 0

    def to_dict(self):
        return {"check": self.check, "n": self.n, "lambda": self.lam,
                "C_explicit": self.C_explicit, "ratio": self.ratio,
                "margin": self.margin if math.isfinite(self.margin) else None,
                "status": self.status, "probes": self.probes}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def format_table(reports):
    """Fixed-width text table of reports."""
    head = f"{'check':<14}{'n':>3}{'lambda':>8}{'C_explicit':>14}{'ratio':>14}{'margin':>14}  status"
    lines = [head, "-" * len(head)]
    for r in reports:
        lam = "" if r.lam is None else f"{r.lam:g}"
        margin = "inf" if not math.isfinite(r.margin) else f"{r.margin:.6g}"
        lines.append(f"{r.check:<14}{r.n:>3}{lam:>8}{r.C_explicit:>14.6g}{r.ratio:>14.6g}"
                     f"{margin:>14}  {r.status}")
    return "\n".join(lines)


def _finalize(report):
    if report.status == "ok" and not report.C_explicit - report.ratio >= 0:
        report.status = "violated"
    return report


def _require_smooth(b, n):
    if n > b.smoothness_order:
        raise InsufficientSmoothness(
            f"bell {b.bell_id} has smoothness {b.smoothness_order} < n={n}")


# constants -----------------------------------------------------------------------


def psi_cn_norm(b, n):
    """``||psi||_{C^n_K}`` with ``psi = sqrt(2) b``."""
    return basis.SQRT2 * b.sup_norm(n)


def psi_x_norm(b, mu, n, points=20001):
    """``||psi||_{X_{mu,n}} = max_{m <= n} sup_K omega_mu(u) u^m |psi^{(m)}(u)|``."""
    u = np.union1d(np.linspace(b.support_lo, b.support_hi, points), b.breakpoints)
    w = seminorms.weight(mu, u)
    best = 0.0
    for m in range(n + 1):
        best = max(best, float(np.max(w * u**m * np.abs(basis.SQRT2 * b.eval_derivative(m, u)))))
    return best


def lemma1_constant(b, n):
    L = b.support_hi - b.support_lo
    return 2.0**n * (1.0 + 2.0**n * L * psi_cn_norm(b, n) / (2 * math.pi) ** n
                     + L * psi_cn_norm(b, 0))


def lemma2_constant(b, n):
    return 4.0**n * math.pi ** (n + 2) / 3.0 * psi_cn_norm(b, n)


def geometric_sum(j_min, j_max):
    """``sum_{j_min <= j <= j_max} 2^{-|j|/2}`` (``3 + 2 sqrt 2`` over all of Z)."""
    js = np.arange(j_min, j_max + 1)
    # ascending |j| keeps the summation order independent of the window's sign layout
    terms = np.sort(2.0 ** (-np.abs(js) / 2.0))
    return float(math.fsum(terms))


def isoxy_constant_a(b, lam, n):
    u = np.linspace(b.support_lo, b.support_hi, 20001)
    return lemma1_constant(b, n) * float(np.max(seminorms.weight(abs(lam), u)
                                                / np.minimum(1.0, u**n)))


def isoxy_constant_b(b, lam, n, window):
    top = max(1.0, b.support_hi**n)
    return (4.0**n * math.pi ** (n + 2) / 3.0 * top
            * geometric_sum(window.j_min, window.j_max) * psi_x_norm(b, abs(lam - 1), n))


# function to coefficients ------------------------------------------------------------


def dilated_cn(phi, j, K, n, points_per_unit=2048):
    """``||phi(2^j .)||_{C^n_K}``."""
    return seminorms.cn_seminorm(phi.dilate(2.0**j), K, n, points_per_unit)


def verify_lemma1(phi: SampledFunction, b, window: IndexWindow, n, spec=QuadSpec(),
                  coeffs=None, threads=None):
    """``max (1 + |k|)^n |c_{j,k}| / (2^{j/2} ||phi(2^j .)||_{C^n_K})`` against ``C_n``."""
    _require_smooth(b, n)
    if n > phi.n_max:
        raise InsufficientSmoothness(f"need {n} derivatives of {phi.name}, have {phi.n_max}")
    if coeffs is None:
        coeffs = analyze(phi, b, window, spec, threads=threads)
    K = (b.support_lo, b.support_hi)
    weights = (1.0 + np.abs(window.ks)) ** n
    norms = ordered_map(lambda j: dilated_cn(phi, int(j), K, n), window.js, threads)
    ratio = 0.0
    skipped = 0
    for j, norm in zip(window.js, norms):
        top = float(np.max(weights * np.abs(coeffs.row(j))))
        if norm == 0.0:
            skipped += int(top > 0)
            continue
        ratio = max(ratio, top / (2.0 ** (j / 2.0) * norm))
    probes = {"window": window.to_dict(), "function": phi.name, "bell": b.bell_id,
              "zero_norm_rows_with_mass": skipped}
    return _finalize(BoundReport("lemma1", n, lemma1_constant(b, n), ratio, None, "ok", probes))


# coefficients to function ------------------------------------------------------------


def _s_norm_window(row, ks, n):
    return float(np.max((1.0 + np.abs(ks)) ** n * np.abs(row)))


def verify_lemma2(row, b, js, n, points=4097):
    """``max_{j, m <= n, x} |d^m sum_k c_k psi_{j,k}| 2^{j/2} min(1, 2^{jn}) / ||c||_{s^{n+2}}``."""
    _require_smooth(b, n)
    row = np.asarray(row, dtype=complex)
    k_max = (len(row) - 1) // 2
    ks = np.arange(-k_max, k_max + 1)
    denom = _s_norm_window(row, ks, n + 2)
    ratio = 0.0
    if denom > 0:
        window = IndexWindow(min(js), max(js), k_max)
        for j in js:
            lo, hi = basis.support(b, j)
            x = np.union1d(np.linspace(lo, hi, points), [2.0**j * p for p in b.breakpoints])
            values = np.zeros(window.shape, dtype=complex)
            values[window.row(j)] = row
            c = CoeffArray(window, values, b.bell_id)
            for m in range(n + 1):
                sup = float(np.max(np.abs(synthesize(c, b, x, m))))
                ratio = max(ratio, sup * 2.0 ** (j / 2.0) * min(1.0, 2.0 ** (j * n)) / denom)
    probes = {"js": [int(j) for j in js], "k_max": int(k_max), "bell": b.bell_id,
              "points": points}
    return _finalize(BoundReport("lemma2", n, lemma2_constant(b, n), ratio, None, "ok", probes))


# iso XY ------------------------------------------------------------------------------


def verify_isoXY_a(phi, b, lam, n, window, spec=QuadSpec(), coeffs=None, T=20, threads=None):
    """``||Psi phi||_{Y_{lam - 1/2, n}} <= C_a ||phi||_{X_{lam, n}}``."""
    _require_smooth(b, n)
    C = isoxy_constant_a(b, lam, n)
    if phi.descriptor != "smooth" or n > phi.n_max:
        # not a C^n function: the X norm is infinite and the bound says nothing
        probes = {"window": window.to_dict(), "function": phi.name, "bell": b.bell_id,
                  "source_norm": None, "reason": f"{phi.descriptor} input", "T": T}
        return BoundReport("isoXY_a", n, C, math.nan, lam, "vacuous", probes)
    src = seminorms.x_norm(phi, lam, n, T=T)
    probes = {"window": window.to_dict(), "function": phi.name, "bell": b.bell_id,
              "source_norm": src.value if src.finite else None, "T": T}
    if not src.finite:
        return BoundReport("isoXY_a", n, C, math.nan, lam, "vacuous", probes)
    if coeffs is None:
        coeffs = analyze(phi, b, window, spec, threads=threads)
    target = seminorms.y_norm(coeffs, lam - 0.5, n)
    probes["target_norm"] = target
    ratio = 0.0 if target == 0 else target / src.value
    return _finalize(BoundReport("isoXY_a", n, C, ratio, lam, "ok", probes))


def verify_isoXY_b(c, b, lam, n, T=20):
    """``||Psi^{-1} c||_{X_{lam - 1, n}} <= C_b ||c||_{Y_{lam, n+2}}``."""
    _require_smooth(b, n)
    C = isoxy_constant_b(b, lam, n, c.window)
    src = seminorms.y_norm(c, lam, n + 2)
    F = synthesized_function(c, b)
    target = seminorms.x_norm(F, lam - 1.0, n, T=T)
    probes = {"window": c.window.to_dict(), "bell": b.bell_id, "source_norm": src,
              "target_norm": target.value, "target_status": target.status, "T": T}
    if src == 0:
        return BoundReport("isoXY_b", n, C, 0.0, lam, "ok", probes)
    return _finalize(BoundReport("isoXY_b", n, C, target.value / src, lam, "ok", probes))


def verify_isoXY(obj, b, lam, n, window=None, **kwargs):
    """Direction (a) for a :class:`SampledFunction`, direction (b) for a coefficient array."""
    if isinstance(obj, SampledFunction):
        if window is None:
            raise ValueError("direction (a) needs an index window")
        return verify_isoXY_a(obj, b, lam, n, window, **kwargs)
    return verify_isoXY_b(obj, b, lam, n, **kwargs)


# duality -----------------------------------------------------------------------------


@dataclass
class DualityReport:
    direct: complex
    coefficient: complex
    residual: float
    tail_bound: float
    status: str
    k_max: int

    def to_dict(self):
        return {"direct": [self.direct.real, self.direct.imag],
                "coefficient": [self.coefficient.real, self.coefficient.imag],
                "residual": self.residual,
                "tail_bound": self.tail_bound if math.isfinite(self.tail_bound) else None,
                "status": self.status, "k_max": self.k_max}


def direct_pairing(f, phi, spec=QuadSpec()):
    """``<f, phi> = int f conj(phi)`` plus ``(-1)^p w conj(phi^{(p)}(a))`` per point mass."""
    from .quadrature import integrate
    from .transform import _intersect

    total = 0j
    for pm in f.point_masses:
        val = np.asarray(phi.eval_derivative(pm.order, np.array([pm.location])))[0]
        total += (-1) ** pm.order * pm.weight * np.conj(val)
    if f.has_regular_part and phi.has_regular_part:
        span = _intersect(f.support, phi.support)
        if span is not None:
            res = integrate(lambda x: np.asarray(f.eval(x)) * np.conj(phi.eval(x)), span, 0.0,
                            spec, list(f.breakpoints) + list(phi.breakpoints))
            total += complex(res.value)
    return complex(total)


def _tail_energy(g, coeffs, b, window, spec):
    if g.point_masses:
        return math.inf
    from .transform import _intersect, _window_span
    span = _intersect(_window_span(b, window), g.support)
    norm2 = l2_norm_squared(g, span, spec) if span else 0.0
    return max(norm2 - float(np.sum(np.abs(coeffs.values) ** 2)), 0.0)


def verify_duality(f, phi, b, window, spec=QuadSpec(), orthonormal_tol=1e-10):
    """``|<f, phi> - sum_w c(f) conj(c(phi))|`` for an orthonormal bell.

    ``tail_bound`` is the Cauchy-Schwarz bound from the Parseval defects of
    both inputs (infinite when ``f`` carries point masses).
    """
    from .designer import residuals

    res = residuals(b, 64)
    if res.max_abs() > orthonormal_tol:
        return DualityReport(math.nan, math.nan, math.nan, math.nan,
                             f"refused: bell {b.bell_id!r} is not orthonormal on the half-line "
                             f"(max residual {res.max_abs():.3g})", window.k_max)
    cf = analyze(f, b, window, spec)
    cp = analyze(phi, b, window, spec)
    coef = complex(np.sum(cf.values * np.conj(cp.values)))
    direct = direct_pairing(f, phi, spec)
    tail = math.sqrt(_tail_energy(f, cf, b, window, spec) * _tail_energy(phi, cp, b, window, spec)) \
        if not f.point_masses else math.inf
    return DualityReport(direct, coef, abs(direct - coef), tail, "ok", window.k_max)
