"""Half-line wavelet system ``psi_{j,k}(x) = sqrt(2) 2^{-j/2} e^{-2 pi i k x / 2^j} b(x / 2^j)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BasisIndex:
    j: int
    k: int


@dataclass(frozen=True)
class IndexWindow:
    """Truncation ``j in [j_min, j_max]``, ``k in [-k_max, k_max]`` of Z x Z."""

    j_min: int
    j_max: int
    k_max: int

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise ValueError(f"empty window: j_min={self.j_min} > j_max={self.j_max}")
        if self.k_max < 0:
            raise ValueError("k_max must be non-negative")

    @property
    def js(self):
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def ks(self):
        return np.arange(-self.k_max, self.k_max + 1)

    @property
    def shape(self):
        return (self.j_max - self.j_min + 1, 2 * self.k_max + 1)

    def row(self, j):
        return j - self.j_min

    def col(self, k):
        return k + self.k_max

    def __contains__(self, idx):
        j, k = idx
        return self.j_min <= j <= self.j_max and abs(k) <= self.k_max

    def to_dict(self):
        return {"jmin": self.j_min, "jmax": self.j_max, "kmax": self.k_max}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["jmin"]), int(data["jmax"]), int(data["kmax"]))


def _check_positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("basis functions live on (0, inf); got x <= 0")
    return x


def eval_psi(b, idx, x):
    """Evaluate ``psi_{j,k}`` at ``x > 0`` (scalar or array)."""
    j, k = (idx.j, idx.k) if isinstance(idx, BasisIndex) else idx
    return eval_psi_derivative(b, j, k, x, 0)


def eval_psi_derivative(b, j, k, x, m=0):
    """``d^m/dx^m psi_{j,k}(x)``; ``k`` may be an array (broadcast against ``x``).

    Leibniz rule on the product of the modulation and the dilated bell.
    """
    x = _check_positive(x)
    k = np.asarray(k, dtype=float)
    scale = 2.0**j
    u = x / scale
    if k.ndim:
        phase = phase_matrix(k, x / scale)
    else:
        phase = np.exp(-2j * np.pi * k * x / scale)
    freq = -2j * np.pi * k / scale
    if k.ndim:
        freq = freq[(...,) + (None,) * x.ndim]
    total = 0.0
    for i in range(m + 1):
        bell_i = b.eval_derivative(i, u) / scale**i
        total = total + comb(m, i) * freq ** (m - i) * bell_i
    return SQRT2 * scale**-0.5 * phase * total


_BLOCK = 16


def phase_matrix(ks, t):
    """``exp(-2 pi i k t)`` for integer ``ks`` (1-D) against ``t`` (1-D).

    Integer frequencies are split as ``k = 16 a + r`` so only
    ``(#a + #r) * len(t)`` exponentials are evaluated.
    """
    ks = np.asarray(ks)
    t = np.asarray(t, dtype=float)
    if ks.size < 4 * _BLOCK or np.any(ks != np.round(ks)):
        return np.exp(-2j * np.pi * np.multiply.outer(ks, t))
    ki = ks.astype(np.int64)
    hi, lo = np.divmod(ki, _BLOCK)
    hi_vals, hi_idx = np.unique(hi, return_inverse=True)
    coarse = np.exp(-2j * np.pi * np.multiply.outer(_BLOCK * hi_vals, t))
    fine = np.exp(-2j * np.pi * np.multiply.outer(np.arange(_BLOCK), t))
    return coarse[hi_idx] * fine[lo]


def psi_rows(b, j, ks, x, m=0):
    """Matrix ``P[k_index, x_index] = psi^{(m)}_{j,k}(x)`` for one scale."""
    return eval_psi_derivative(b, j, np.asarray(ks), np.asarray(x, dtype=float), m)


def support(b, j):
    """``[2^j R0, 2^j R1]``."""
    scale = 2.0**j
    return (scale * b.support_lo, scale * b.support_hi)


def scales_meeting(b, K):
    """All ``j`` with ``[2^j R0, 2^j R1]`` intersecting the compact ``K`` (endpoints count)."""
    lo, hi = K
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValueError("K must be bounded")
    if lo <= 0:
        raise ValueError("K must stay away from 0")
    if hi < lo:
        raise ValueError("K must be a non-empty interval")
    # need 2^j R0 <= hi and 2^j R1 >= lo
    j_hi = math.floor(math.log2(hi / b.support_lo))
    j_lo = math.ceil(math.log2(lo / b.support_hi))
    out = []
    for j in range(j_lo - 1, j_hi + 2):
        s_lo, s_hi = support(b, j)
        if s_lo <= hi and s_hi >= lo:
            out.append(j)
    return out


def conj_symmetry_check(b, j, k, x):
    """``|conj(psi_{j,k}(x)) - psi_{j,-k}(x)|``; zero for a real bell."""
    return float(np.abs(np.conj(eval_psi(b, (j, k), x)) - eval_psi(b, (j, -k), x)))
