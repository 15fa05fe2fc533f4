"""Reference functions and distributions with closed-form derivatives and expected verdicts.

Each smooth entry's derivatives come from a polynomial recursion:

* ``exp(-1/(1-s^2))`` bump: ``phi^{(m)} = P_m(s) (1-s^2)^{-2m} phi`` with
  ``P_{m+1} = P_m' (1-s^2)^2 + 4 m s (1-s^2) P_m - 2 s P_m``.
* ``exp(-x - 1/x)``: ``phi^{(m)} = Q_m(x) x^{-2m} phi`` with
  ``Q_{m+1} = x^2 Q_m' - 2 m x Q_m + (1 - x^2) Q_m``.
* ``exp(1/x)``: same shape with ``R_{m+1} = x^2 R_m' - 2 m x R_m - R_m``.
* ``sin(x^2) = Im exp(i x^2)``: ``d^m exp(i x^2) = H_m(x) exp(i x^2)`` with
  ``H_{m+1} = H_m' + 2 i x H_m``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .functions import SampledFunction, point_mass

UNPRIMED = ("D", "S", "O_C", "O_M", "E")
PRIMED = ("E'", "O_M'", "O_C'", "S'", "D'")
FLAGS = UNPRIMED + PRIMED
N_DERIVS = 8


def _poly_recursion(start, step, count):
    polys = [start]
    for m in range(count):
        polys.append(step(polys[-1], m))
    return polys


# bump on [a, b] -----------------------------------------------------------

def bump(a=1.0, b=2.0):
    """``exp(-1/(1 - s^2))``, ``s = (2x - a - b)/(b - a)``, supported on [a, b]."""
    one_minus = Polynomial([1.0, 0.0, -1.0])
    s_poly = Polynomial([0.0, 1.0])
    polys = _poly_recursion(
        Polynomial([1.0]),
        lambda P, m: P.deriv() * one_minus**2 + 4 * m * s_poly * one_minus * P - 2 * s_poly * P,
        N_DERIVS,
    )
    ds = 2.0 / (b - a)

    def deriv(m, x):
        x = np.asarray(x, dtype=float)
        s = (2.0 * x - a - b) / (b - a)
        inside = np.abs(s) < 1
        out = np.zeros_like(x)
        si = s[inside]
        q = 1.0 - si**2
        with np.errstate(under="ignore"):
            out[inside] = ds**m * polys[m](si) * q ** (-2.0 * m) * np.exp(-1.0 / q)
        return out

    return SampledFunction(lambda x: deriv(0, x), deriv, N_DERIVS, (a, b), (), name="bump12")


def exp_two_sided():
    """``exp(-x - 1/x)``: in S(R+) but not compactly supported."""
    x_poly = Polynomial([0.0, 1.0])
    polys = _poly_recursion(
        Polynomial([1.0]),
        lambda Q, m: x_poly**2 * Q.deriv() - 2 * m * x_poly * Q + (1 - x_poly**2) * Q,
        N_DERIVS,
    )

    def deriv(m, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(under="ignore", over="ignore", invalid="ignore", divide="ignore"):
            # log-domain product avoids inf * 0 at the ends of the grid
            base = -x - 1.0 / x
            q = polys[m](x)
            mag = np.exp(base - 2 * m * np.log(x) + np.log(np.abs(q)))
            out = np.sign(q) * mag
        return np.nan_to_num(out, nan=0.0, posinf=0.0, neginf=0.0)

    return SampledFunction(lambda x: deriv(0, x), deriv, N_DERIVS, (0.0, math.inf),
                           name="exp_two_sided")


def power(alpha):
    """``x ** alpha``."""

    def deriv(m, x):
        x = np.asarray(x, dtype=float)
        coeff = math.prod(alpha - i for i in range(m))
        return coeff * x ** (alpha - m)

    return SampledFunction(lambda x: deriv(0, x), deriv, N_DERIVS, (0.0, math.inf),
                           name=f"x^{alpha}")


def sin_square():
    """``sin(x^2)``."""
    x_poly = Polynomial([0.0, 1.0])
    polys = _poly_recursion(Polynomial([1.0 + 0j]),
                            lambda H, m: H.deriv() + 2j * x_poly * H, N_DERIVS)

    def deriv(m, x):
        x = np.asarray(x, dtype=float)
        return np.imag(polys[m](x) * np.exp(1j * x * x))

    return SampledFunction(lambda x: np.sin(np.asarray(x, dtype=float) ** 2), deriv, N_DERIVS,
                           (0.0, math.inf), name="sinx2")


def exp_growth():
    """``exp(x)``."""

    def deriv(m, x):
        with np.errstate(over="ignore"):
            return np.exp(np.asarray(x, dtype=float))

    return SampledFunction(lambda x: deriv(0, x), deriv, N_DERIVS, (0.0, math.inf), name="expx")


def exp_inverse():
    """``exp(1/x)``."""
    x_poly = Polynomial([0.0, 1.0])
    polys = _poly_recursion(
        Polynomial([1.0]),
        lambda R, m: x_poly**2 * R.deriv() - 2 * m * x_poly * R - R,
        N_DERIVS,
    )

    def deriv(m, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = polys[m](x) * x ** (-2.0 * m) * np.exp(1.0 / x)
        return np.where(np.isnan(out), np.inf, out)

    return SampledFunction(lambda x: deriv(0, x), deriv, N_DERIVS, (0.0, math.inf),
                           name="exp_inv")


def inv_sqrt_window(a, b):
    """``x^{-1/2} 1_(a, b]``; ``a = 0`` gives the singular head at the origin."""

    def func(x):
        x = np.asarray(x, dtype=float)
        inside = (x > a) & (x <= b)
        return np.where(inside, np.abs(x) ** -0.5, 0.0)

    def deriv(m, x):
        x = np.asarray(x, dtype=float)
        inside = (x > a) & (x < b)
        coeff = math.prod(-0.5 - i for i in range(m))
        return np.where(inside, coeff * np.abs(x) ** (-0.5 - m), 0.0)

    breaks = (a, b) if a > 0 else (b,)
    return SampledFunction(func, deriv, N_DERIVS, (a, b), breaks,
                           name=f"invsqrt_{a:g}_{b:g}")


# corpus ----------------------------------------------------------------------


def _chain(top, chain):
    return {f: i >= chain.index(top) for i, f in enumerate(chain)} if top else \
        {f: False for f in chain}


def expected_flags(unprimed_top=None, primed_top=None, extra_primed=()):
    """Flags closed under the inclusion chains, from the smallest space each side.

    ``unprimed_top='S'`` sets S, O_C, O_M, E; ``primed_top="S'"`` sets S', D'.
    """
    flags = _chain(unprimed_top, UNPRIMED)
    flags.update(_chain(primed_top, PRIMED))
    for f in extra_primed:
        flags[f] = True
    return flags


@dataclass
class CorpusEntry:
    id: str
    function: SampledFunction
    expected: dict
    description: str
    side: str = "function"
    expected_coeff: dict = field(default=None)
    n_max: int = N_DERIVS

    def manifest(self):
        return {
            "id": self.id,
            "description": self.description,
            "side": self.side,
            "expected_flags": sorted(k for k, v in self.expected.items() if v),
            "expected_coeff_flags": None if self.expected_coeff is None
            else sorted(k for k, v in self.expected_coeff.items() if v),
        }


def corpus():
    """Canonical entries, each witnessing one separation in the inclusion chain."""
    entries = [
        CorpusEntry("bump12", bump(1.0, 2.0), expected_flags("D", "E'"),
                    "smooth bump supported on [1, 2]: in D"),
        CorpusEntry("exp_two_sided", exp_two_sided(), expected_flags("S", "S'"),
                    "exp(-x - 1/x): in S but not compactly supported"),
        CorpusEntry("sqrt", power(0.5), expected_flags("O_C", "S'"),
                    "x^(1/2): in O_C, polynomial growth excludes S"),
        CorpusEntry("inv_square", power(-2.0), expected_flags("O_C", "S'"),
                    "x^(-2): in O_C, blow-up at 0 excludes S"),
        CorpusEntry("sinx2", sin_square(), expected_flags("O_M", "S'"),
                    "sin(x^2): in O_M, derivative growth unbounded in order excludes O_C"),
        CorpusEntry("expx", exp_growth(), expected_flags("E", "D'"),
                    "exp(x): smooth, exponential growth excludes O_M"),
        CorpusEntry("exp_inv", exp_inverse(), expected_flags("E", "D'"),
                    "exp(1/x): smooth, exponential blow-up at 0 excludes O_M"),
    ]
    for a in (0.5, 1.0, 3.0):
        for p in (0, 1):
            flags = expected_flags(None, "E'")
            entries.append(CorpusEntry(f"delta{p}_{a:g}", point_mass(a, p), flags,
                                       f"order-{p} point mass at {a:g}: in E'",
                                       side="distribution", expected_coeff=flags, n_max=0))
    entries += [
        CorpusEntry("invsqrt_head", inv_sqrt_window(0.0, 1.0), expected_flags(None, "S'"),
                    "x^(-1/2) on (0, 1]: locally integrable, tempered, not compactly supported",
                    side="distribution", expected_coeff=expected_flags(None, "S'")),
        CorpusEntry("invsqrt_window", inv_sqrt_window(0.25, 1.0), expected_flags(None, "E'"),
                    "x^(-1/2) on (1/4, 1]: compactly supported L^1 function, in E'",
                    side="distribution", expected_coeff=expected_flags(None, "E'")),
    ]
    return entries


def get_entry(entry_id):
    for entry in corpus():
        if entry.id == entry_id:
            return entry
    raise KeyError(entry_id)


def extra_inputs():
    """Inputs used by the CLI and transform checks that carry no table claim."""
    from .functions import indicator, polynomial_window

    return {
        "indicator12": indicator(1.0, 2.0),
        "ramp12": polynomial_window([0.0, 1.0], 1.0, 2.0),
        "square12": polynomial_window([0.0, 0.0, 1.0], 1.0, 2.0),
        "delta0_1.5": point_mass(1.5, 0),
    }


def resolve_input(name):
    extras = extra_inputs()
    if name in extras:
        return extras[name]
    return get_entry(name).function


def input_ids():
    return [e.id for e in corpus()] + list(extra_inputs())


def manifest_json(**kwargs):
    return json.dumps([e.manifest() for e in corpus()], **kwargs)
