"""Membership patterns for the ten spaces of the table, on both sides of the analysis map.

Every verdict is "consistent with" on the probed window and grids: membership
over infinite index sets cannot be decided from finitely many samples.

Function side (X-sweeps)
    S      finite for every probed ``lambda > 0`` and ``n``
    O_C    one ``lambda < 0`` finite for every ``n``, and ``lambda*(n)`` has
           stopped moving at the top of the ``n`` grid
    O_M    each ``n`` has some finite ``lambda < 0``
    E      ``C^n_K`` finite on the probe compacts
    D      E plus a declared compact support with numerically zero tails

Coefficient side (Y-sweeps), flags named after the function spaces they mirror
    D   <-> finite band of ``j`` strictly inside the window, rows in ``s``
    S   <-> all probed ``lambda > 0`` finite
    O_C <-> one ``lambda < 0`` uniform over ``n`` (same stabilisation rule)
    O_M <-> each ``n`` has some finite ``lambda < 0``
    E   <-> every row in ``s``
    primed flags use the weights ``(1 + |k|)^{-n}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import seminorms
from ._parallel import ordered_map
from .corpus import FLAGS, PRIMED, UNPRIMED
from .functions import SampledFunction

SEQUENCE_NAMES = {
    "D": "(+)_Z s", "S": "kappa_1 (x) s", "O_C": "kappa_1' (x) iota s",
    "O_M": "kappa_1' (x) s", "E": "Pi_Z s",
    "E'": "(+)_Z s'", "O_M'": "kappa_1 (x) s'", "O_C'": "kappa_1 (x) iota s'",
    "S'": "kappa_1' (x) s'", "D'": "Pi_Z s'",
}

FUNCTION_LAMBDAS = tuple(x for x in np.arange(-10.0, 6.01, 0.5) if x != 0.0)
COEFF_LAMBDAS = tuple(np.arange(-10.0, -0.49, 0.5)) + (0.5, 1.0, 2.0, 4.0)
DEFAULT_NS = (0, 1, 2, 3, 4)
PROBE_COMPACTS = ((1 / 16, 1 / 8), (0.5, 2.0), (8.0, 16.0))
GROWTH_TOL = 0.05


def _chain_violations(flags):
    bad = []
    for chain in (UNPRIMED, PRIMED):
        for small, big in zip(chain[:-1], chain[1:]):
            if flags[small] and not flags[big]:
                bad.append(f"{small} set without {big}")
    return bad


@dataclass
class TableVerdict:
    """Flags for the ten spaces plus the evidence behind them.

    ``status`` is ``"ok"`` or ``"inconclusive"``; ``limits`` records the
    window and grids the verdict is relative to.
    """

    flags: dict
    exponents: dict = field(default_factory=dict)
    evidence: list = field(default_factory=list)
    limits: dict = field(default_factory=dict)
    status: str = "ok"
    side: str = "function"
    notes: list = field(default_factory=list)

    @property
    def set_flags(self):
        return [f for f in FLAGS if self.flags.get(f)]

    def lattice_ok(self):
        return not _chain_violations(self.flags)

    def to_dict(self):
        return {
            "side": self.side,
            "status": self.status,
            "flags": {f: bool(self.flags[f]) for f in FLAGS},
            "exponents": self.exponents,
            "evidence": self.evidence,
            "limits": self.limits,
            "notes": list(self.notes),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _lambda_star(finite, lams, ns):
    """Largest finite ``lambda`` for each ``n`` (``None`` when none is)."""
    out = {}
    for n in ns:
        ok = [lam for lam in lams if finite[(lam, n)]]
        out[n] = max(ok) if ok else None
    return out


def _monotone_issues(finite, lams, ns):
    # finiteness must be downward closed in lambda and in n
    issues = []
    lams = sorted(lams)
    for n in ns:
        seen_div = False
        for lam in lams:
            if not finite[(lam, n)]:
                seen_div = True
            elif seen_div:
                issues.append(f"finite at lambda={lam:g}, n={n} above a divergent lambda")
                break
    ns = sorted(ns)
    for lam in lams:
        for lo, hi in zip(ns[:-1], ns[1:]):
            if finite[(lam, hi)] and not finite[(lam, lo)]:
                issues.append(f"finite at n={hi} but not n={lo} (lambda={lam:g})")
    return issues


def _ladder_flags(finite, lams, ns):
    """S, O_C, O_M from a finiteness table over ``lambda x n``."""
    pos = [lam for lam in lams if lam > 0]
    neg = [lam for lam in lams if lam < 0]
    star = _lambda_star(finite, lams, ns)
    s_flag = bool(pos) and all(finite[(lam, n)] for lam in pos for n in ns)
    om_flag = all(any(finite[(lam, n)] for lam in neg) for n in ns)
    uniform = any(all(finite[(lam, n)] for n in ns) for lam in neg)
    top = sorted(ns)[-2:]
    stable = len(top) < 2 or star[top[0]] == star[top[1]]
    return {"S": s_flag, "O_C": uniform and stable, "O_M": om_flag}, star


def _close_primed(flags, top):
    idx = PRIMED.index(top)
    for f in PRIMED[idx:]:
        flags[f] = True


# function side ----------------------------------------------------------------


def _l1_tempered(phi, lam, T, points_per_octave):
    """``int |phi| omega_{-lam} dx`` converges at both ends (geometric decay per octave)."""
    t, x = seminorms.log_grid(T, points_per_octave)
    with np.errstate(all="ignore"):
        vals = np.abs(phi.eval(x))
        prof = np.exp2(np.log2(x) - lam * np.abs(t)) * vals
    prof = np.where(vals == 0, 0.0, np.where(np.isfinite(prof), prof, np.inf))
    for side in ("left", "right"):
        grow, _ = seminorms._side_growth(t, prof, side, T, -GROWTH_TOL)
        if grow:
            return False
    return True


def _zero_tails(phi, support, T, points_per_octave):
    t, x = seminorms.log_grid(T, points_per_octave)
    outside = (x < support[0]) | (x > support[1])
    vals = np.abs(phi.eval(x[outside]))
    return bool(np.all(vals == 0))


def classify_function(phi: SampledFunction, lams=FUNCTION_LAMBDAS, ns=DEFAULT_NS,
                      T=20, points_per_octave=64, compacts=PROBE_COMPACTS, threads=None):
    """Table flags of ``phi`` from X-sweeps, C^n_K probes and support data.

    Point masses and non-smooth functions receive primed flags only: a
    compact support gives the whole chain from E'; otherwise S' is set when
    ``int |phi| omega_{-lambda} dx`` converges for some probed ``lambda > 0``.
    Primed flags between E' and S' are not probed for non-compact inputs.
    """
    lams = tuple(float(x) for x in lams if x != 0)
    ns = tuple(int(n) for n in ns)
    flags = {f: False for f in FLAGS}
    evidence = []
    exponents = {}
    notes = []
    status = "ok"
    smooth = phi.descriptor == "smooth" and phi.n_max >= max(ns)
    compact = phi.compact_support

    # primed side
    flags["D'"] = True
    if compact is not None:
        _close_primed(flags, "E'")
    elif phi.has_regular_part and not phi.point_masses:
        if any(_l1_tempered(phi, lam, T, points_per_octave) for lam in lams if lam > 0):
            _close_primed(flags, "S'")

    if smooth:
        keys = [(lam, n) for n in ns for lam in lams]
        values = ordered_map(
            lambda key: seminorms.x_norm(phi, key[0], key[1], T, points_per_octave, GROWTH_TOL),
            keys, threads)
        finite = {}
        for (lam, n), v in zip(keys, values):
            finite[(lam, n)] = v.finite
            evidence.append({"lambda": lam, "n": n, "status": v.status,
                             "value": v.value if v.finite else None,
                             "slope": v.slope})
        ladder, star = _ladder_flags(finite, lams, ns)
        exponents["lambda_star"] = {str(n): star[n] for n in ns}
        e_flag = True
        for K in compacts:
            val = seminorms.cn_seminorm(phi, K, max(ns))
            evidence.append({"compact": list(K), "n": max(ns), "cn": val})
            e_flag &= math.isfinite(val)
        flags["E"] = e_flag
        flags["O_M"] = e_flag and ladder["O_M"]
        flags["O_C"] = flags["O_M"] and ladder["O_C"]
        flags["S"] = flags["O_C"] and ladder["S"]
        if compact is not None and flags["S"]:
            flags["D"] = _zero_tails(phi, phi.support, T, points_per_octave)
        issues = _monotone_issues(finite, lams, ns)
        if issues:
            status = "inconclusive"
            notes += issues
        if ladder["S"] and not ladder["O_C"]:
            status = "inconclusive"
            notes.append("finite for every lambda > 0 but not for a uniform lambda < 0")
    else:
        notes.append(f"descriptor {phi.descriptor!r}: unprimed flags not probed")

    bad = _chain_violations(flags)
    if bad:
        status = "inconclusive"
        notes += bad
    limits = {"grids": {"lambda": list(lams), "n": list(ns), "T": T,
                        "points_per_octave": points_per_octave},
              "compacts": [list(K) for K in compacts]}
    return TableVerdict(flags, exponents, evidence, limits, status, "function", notes)


# coefficient side ---------------------------------------------------------------


def _row_growth(row, ks, n, k_max, zero):
    """log2 growth of ``(1 + |k|)^n |c_k|`` from band ``(K/4, K/2]`` to ``(K/2, K]``."""
    mag = np.where(np.abs(row) > zero, np.abs(row), 0.0)
    ak = np.abs(ks)
    weighted = (1.0 + ak) ** n * mag
    outer = weighted[(ak > k_max / 2) & (ak <= k_max)]
    inner = weighted[(ak > k_max / 4) & (ak <= k_max / 2)]
    o = float(np.max(outer)) if outer.size else 0.0
    i = float(np.max(inner)) if inner.size else 0.0
    if o == 0.0:
        return -math.inf
    if i == 0.0:
        return math.inf
    return math.log2(o) - math.log2(i)


def _row_sups(mags, ks, n):
    return np.max((1.0 + np.abs(ks))[None, :] ** n * mags, axis=1)


def _end_growth(sups, js, lam):
    """Growth of ``2^{lam |j|} sup_k`` into the outermost row at each end of the window."""
    out = {}
    for side, (outer, inner) in (("left", (0, 1)), ("right", (-1, -2))):
        if len(js) < 2:
            out[side] = -math.inf
            continue
        o, i = sups[outer], sups[inner]
        if o == 0.0:
            out[side] = -math.inf
        elif i == 0.0:
            out[side] = math.inf
        else:
            out[side] = (lam * (abs(js[outer]) - abs(js[inner]))
                         + math.log2(o) - math.log2(i))
    return out


def _end_slopes(sups, js):
    """Least-squares slope of ``log2 sup_k`` against ``|j|`` on each side of ``j = 0``."""
    out = {}
    limited = False
    for side, mask in (("left", js <= 0), ("right", js >= 0)):
        sel = mask & (sups > 0)
        if np.count_nonzero(sel) >= 3:
            out[side] = float(np.polyfit(np.abs(js[sel]), np.log2(sups[sel]), 1)[0])
        else:
            out[side] = None
            limited = True
    return out, limited


def classify_coeffs(c, lams=COEFF_LAMBDAS, ns=DEFAULT_NS, growth_tol=GROWTH_TOL):
    """Table flags of a coefficient array from Y-sweeps over ``lambda x (+-n)``.

    Rows count as rapidly decreasing (``s``) when, for every probed ``n``,
    ``(1 + |k|)^n |c_k|`` does not grow from the band ``(K/4, K/2]`` to
    ``(K/2, K]``; as tempered (``s'``) when that holds for some ``-n``.
    Along ``j`` a ``(lambda, n)`` pair diverges when the weighted row sup
    still grows into the outermost row at either end of the window.
    """
    lams = tuple(float(x) for x in lams if x != 0)
    ns = tuple(int(n) for n in ns)
    w = c.window
    js = w.js
    ks = w.ks
    mags = np.abs(c.values)
    top = float(np.max(mags)) if mags.size else 0.0
    zero = max(c.tol, 1e-10 * top)
    mags = np.where(mags > zero, mags, 0.0)
    nonzero_rows = np.flatnonzero(np.any(mags > 0, axis=1))
    notes = []
    evidence = []

    def rows_ok(n):
        return all(_row_growth(mags[r], ks, n, w.k_max, 0.0) <= growth_tol
                   for r in nonzero_rows)

    in_s = {n: rows_ok(n) for n in ns}
    in_s_dual = {n: rows_ok(-n) for n in ns}
    rows_s = all(in_s.values())
    rows_s_dual = any(in_s_dual.values())
    band = (nonzero_rows.size == 0 or
            (nonzero_rows[0] > 0 and nonzero_rows[-1] < len(js) - 1))

    def table(signs):
        finite = {}
        for n in ns:
            sups = _row_sups(mags, ks, signs * n)
            k_ok = in_s[n] if signs > 0 else in_s_dual[n]
            for lam in lams:
                ends = _end_growth(sups, js, lam)
                ok = k_ok and max(ends.values()) <= growth_tol
                finite[(lam, n)] = ok
                evidence.append({"lambda": lam, "n": int(signs * n),
                                 "status": "finite" if ok else "divergent",
                                 "growth": {s: (g if math.isfinite(g) else str(g))
                                            for s, g in ends.items()},
                                 "rows_in_s": k_ok})
        return finite

    finite = table(+1)
    finite_dual = table(-1)
    pos = [lam for lam in lams if lam > 0]
    neg = [lam for lam in lams if lam < 0]

    ladder, star = _ladder_flags(finite, lams, ns)
    flags = {f: False for f in FLAGS}
    flags["E"] = rows_s
    flags["O_M"] = rows_s and ladder["O_M"]
    flags["O_C"] = flags["O_M"] and ladder["O_C"]
    flags["S"] = flags["O_C"] and ladder["S"]
    flags["D"] = flags["S"] and band

    # primed: D' rows in s'; S' some lambda<0 and n; O_C' for each lambda>0 some n;
    # O_M' one n for all lambda>0; E' finite band
    flags["D'"] = rows_s_dual
    flags["S'"] = rows_s_dual and any(finite_dual[(lam, n)] for lam in neg for n in ns)
    flags["O_C'"] = flags["S'"] and bool(pos) and all(
        any(finite_dual[(lam, n)] for n in ns) for lam in pos)
    flags["O_M'"] = flags["O_C'"] and any(
        all(finite_dual[(lam, n)] for lam in pos) for n in ns)
    flags["E'"] = flags["O_M'"] and band

    slopes = {}
    limited = False
    for n in ns:
        slopes[str(n)], lim = _end_slopes(_row_sups(mags, ks, n), js)
        limited |= lim
    dual_star = _lambda_star(finite_dual, lams, ns)
    exponents = {
        "lambda_star": {str(n): star[n] for n in ns},
        "lambda_star_dual": {str(-n): dual_star[n] for n in ns},
        "row_slopes": slopes,
        "k_growth": {str(n): max((_row_growth(mags[r], ks, n, w.k_max, 0.0)
                                  for r in nonzero_rows), default=-math.inf)
                     for n in ns},
    }
    exponents["k_growth"] = {n: (g if math.isfinite(g) else str(g))
                             for n, g in exponents["k_growth"].items()}
    status = "ok"
    issues = _monotone_issues(finite, lams, ns)
    bad = _chain_violations(flags)
    if issues or bad:
        status = "inconclusive"
        notes += issues + bad
    if limited:
        notes.append("window-limited: fewer than 3 nonzero rows on a side of j = 0")
    limits = {"window": w.to_dict(), "grids": {"lambda": list(lams), "n": list(ns)},
              "zero_threshold": zero, "growth_tol": growth_tol,
              "window_limited": limited}
    return TableVerdict(flags, exponents, evidence, limits, status, "coefficients", notes)


# coherence ------------------------------------------------------------------------


@dataclass
class CoherenceReport:
    consistent: bool
    function: TableVerdict
    coefficients: TableVerdict
    violations: list

    def to_dict(self):
        return {"consistent": self.consistent, "violations": self.violations,
                "function": self.function.to_dict(),
                "coefficients": self.coefficients.to_dict()}


def coherence_check(phi, b, window, spec=None, fn_grids=None, coeff_grids=None,
                    coeffs=None, threads=None):
    """Classify ``phi`` and ``analyze(phi)``; every function flag must reappear on the array."""
    from .quadrature import QuadSpec
    from .transform import analyze

    fn_grids = fn_grids or {}
    coeff_grids = coeff_grids or {}
    fv = classify_function(phi, threads=threads, **fn_grids)
    if coeffs is None:
        coeffs = analyze(phi, b, window, spec or QuadSpec(), threads=threads)
    cv = classify_coeffs(coeffs, **coeff_grids)
    violations = []
    for f in FLAGS:
        if fv.flags[f] and not cv.flags[f]:
            related = [e for e in cv.evidence if e.get("status") == "divergent"][:5]
            violations.append({"flag": f, "sequence_space": SEQUENCE_NAMES[f],
                               "evidence": related})
    consistent = not violations and fv.status == "ok" and cv.status == "ok"
    return CoherenceReport(consistent, fv, cv, violations)
