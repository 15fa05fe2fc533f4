"""Analysis map, truncated synthesis, Gram matrices and L2 diagnostics."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import basis
from ._parallel import ordered_map
from .basis import IndexWindow
from .functions import SampledFunction
from .quadrature import QuadSpec, fourier_moments, integrate, integrate_products, l2_error


@dataclass
class CoeffArray:
    """Coefficients ``c[j, k]`` on a finite window.

    ``values[window.row(j), window.col(k)]`` holds ``c_{j,k}``; ``nonconverged``
    marks entries whose quadrature missed its tolerance.
    """

    window: IndexWindow
    values: np.ndarray
    bell_id: str = ""
    tol: float = 0.0
    nonconverged: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.window.shape:
            raise ValueError(f"values shape {self.values.shape} != window shape {self.window.shape}")
        if self.nonconverged is None:
            self.nonconverged = np.zeros(self.window.shape, dtype=bool)

    def __getitem__(self, idx):
        j, k = idx
        return self.values[self.window.row(j), self.window.col(k)]

    def row(self, j):
        return self.values[self.window.row(j)]

    @property
    def converged(self):
        return not bool(np.any(self.nonconverged))

    @classmethod
    def unit(cls, window, j, k, bell_id=""):
        values = np.zeros(window.shape, dtype=complex)
        values[window.row(j), window.col(k)] = 1.0
        return cls(window, values, bell_id)

    def scaled(self, alpha):
        return CoeffArray(self.window, alpha * self.values, self.bell_id, self.tol,
                          self.nonconverged.copy(), dict(self.meta))

    # serialisation ----------------------------------------------------

    def to_dict(self):
        data = np.stack([self.values.real, self.values.imag], axis=-1).reshape(-1, 2)
        out = {
            "window": self.window.to_dict(),
            "bell_id": self.bell_id,
            "data": data.tolist(),
            "tol": self.tol,
            "nonconverged": [[int(j), int(k)] for j, k in self._flagged()],
        }
        if self.meta:
            out["meta"] = self.meta
        return out

    def _flagged(self):
        rows, cols = np.nonzero(self.nonconverged)
        return [(self.window.j_min + r, c - self.window.k_max) for r, c in zip(rows, cols)]

    @classmethod
    def from_dict(cls, data):
        window = IndexWindow.from_dict(data["window"])
        pairs = np.asarray(data["data"], dtype=float).reshape(window.shape + (2,))
        values = pairs[..., 0] + 1j * pairs[..., 1]
        flags = np.zeros(window.shape, dtype=bool)
        for j, k in data.get("nonconverged", []):
            flags[window.row(j), window.col(k)] = True
        return cls(window, values, data.get("bell_id", ""), data.get("tol", 0.0), flags,
                   data.get("meta", {}))

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["j", "k", "re", "im", "abs"])
        for r, j in enumerate(self.window.js):
            for c, k in enumerate(self.window.ks):
                v = self.values[r, c]
                writer.writerow([int(j), int(k), repr(float(v.real)), repr(float(v.imag)),
                                 repr(float(abs(v)))])
        return buf.getvalue()


def _intersect(a, b):
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return (lo, hi) if hi > lo else None


def _scaled_breakpoints(b, j):
    scale = 2.0**j
    return [scale * p for p in b.breakpoints]


def _analyze_row(f, b, j, ks, spec):
    row = np.zeros(len(ks), dtype=complex)
    flags = np.zeros(len(ks), dtype=bool)
    span = basis.support(b, j)
    for pm in f.point_masses:
        if span[0] <= pm.location <= span[1]:
            psi_p = basis.psi_rows(b, j, ks, np.array([pm.location]), pm.order)[:, 0]
            row += (-1) ** pm.order * pm.weight * np.conj(psi_p)
    if f.has_regular_part:
        interval = _intersect(span, f.support)
        if interval is not None:
            scale = 2.0**j
            breaks = _scaled_breakpoints(b, j) + list(f.breakpoints)

            # conj(psi_{j,k}) = sqrt(2) 2^{-j/2} e^{2 pi i k x / 2^j} b(x / 2^j), b real
            def envelope(x):
                return basis.SQRT2 * scale**-0.5 * np.asarray(f.eval(x)) * b.eval(x / scale)

            res = fourier_moments(envelope, interval, ks, scale, spec, breaks)
            row += res.value
            if not res.converged:
                flags[:] = True
    return row, flags


def analyze(f: SampledFunction, b, window: IndexWindow, spec=QuadSpec(), threads=None):
    """``c_{j,k} = int f conj(psi_{j,k})`` (point masses pair through derivatives).

    Rows are independent and may be computed on a worker pool; assembly is in
    ascending ``j``.
    """
    ks = window.ks
    rows = ordered_map(lambda j: _analyze_row(f, b, int(j), ks, spec), window.js, threads)
    values = np.array([r[0] for r in rows])
    flags = np.array([r[1] for r in rows])
    return CoeffArray(window, values, b.bell_id, spec.tol, flags)


def synthesize(c: CoeffArray, b, x, m=0):
    """``sum_{(j,k) in window} c_{j,k} psi^{(m)}_{j,k}(x)``, ascending ``j`` then ``k``."""
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x)
    out = np.zeros(flat.shape, dtype=complex)
    ks = c.window.ks
    for j in c.window.js:
        row = c.row(j)
        if not np.any(row):
            continue
        lo, hi = basis.support(b, int(j))
        inside = (flat >= lo) & (flat <= hi)
        if not np.any(inside):
            continue
        P = basis.psi_rows(b, int(j), ks, flat[inside], m)
        out[inside] += row @ P
    return out.reshape(x.shape) if x.ndim else out[0]


def synthesized_function(c: CoeffArray, b, n_max=None):
    """The partial sum as a :class:`SampledFunction` with derivatives up to the bell's order."""
    if n_max is None:
        n_max = b.smoothness_order
    span = (2.0**c.window.j_min * b.support_lo, 2.0**c.window.j_max * b.support_hi)
    breaks = sorted({p for j in c.window.js for p in _scaled_breakpoints(b, int(j))})
    out = SampledFunction(lambda x: synthesize(c, b, x),
                          lambda m, x: synthesize(c, b, x, m),
                          n_max=n_max, support=span, breakpoints=breaks,
                          real=False, name="synthesis")
    return out


def gram(b, window: IndexWindow, spec=QuadSpec(), full_output=False):
    """``G[(j,k),(j',k')] = int psi_{j,k} conj(psi_{j',k'})`` over the window.

    Rows/columns are ordered ``(j ascending, k ascending)``. Blocks for
    disjoint (or point-touching) supports are exactly zero.
    """
    js = [int(j) for j in window.js]
    ks = window.ks
    nk = len(ks)
    G = np.zeros((len(js) * nk, len(js) * nk), dtype=complex)
    worst = 0.0
    converged = True
    for a, j in enumerate(js):
        for bidx in range(a, len(js)):
            jp = js[bidx]
            overlap = _intersect(basis.support(b, j), basis.support(b, jp))
            if overlap is None:
                continue
            freq = window.k_max * (2.0**-j + 2.0**-jp)
            breaks = _scaled_breakpoints(b, j) + _scaled_breakpoints(b, jp)
            res = integrate_products(lambda x, j=j: basis.psi_rows(b, j, ks, x),
                                     lambda x, jp=jp: basis.psi_rows(b, jp, ks, x),
                                     overlap, freq, spec, breaks)
            G[a * nk:(a + 1) * nk, bidx * nk:(bidx + 1) * nk] = res.value
            if bidx != a:
                G[bidx * nk:(bidx + 1) * nk, a * nk:(a + 1) * nk] = res.value.conj().T
            worst = max(worst, res.err_est)
            converged &= res.converged
    if full_output:
        return G, {"err_est": worst, "converged": converged}
    return G


def gram_index(window, j, k):
    return window.row(j) * (2 * window.k_max + 1) + window.col(k)


def _window_span(b, window):
    return (2.0**window.j_min * b.support_lo, 2.0**window.j_max * b.support_hi)


def l2_norm_squared(f, interval, spec=QuadSpec()):
    lo, hi = interval
    res = integrate(lambda x: np.abs(f.eval(x)) ** 2, (lo, hi), 0.0, spec, f.breakpoints)
    return float(np.real(res.value))


def parseval_defect(f, b, window, spec=QuadSpec(), coeffs=None):
    """``| sum_window |c_{j,k}|^2 - ||f||^2 |``."""
    if coeffs is None:
        coeffs = analyze(f, b, window, spec)
    energy = float(np.sum(np.abs(coeffs.values) ** 2))
    interval = _intersect(_window_span(b, window), f.support) if f.has_regular_part else None
    norm2 = l2_norm_squared(f, interval, spec) if interval else 0.0
    return abs(energy - norm2)


def reconstruction_error(f, b, window, K, spec=QuadSpec(), coeffs=None):
    """L2 distance on ``K`` between ``f`` and the synthesis of its coefficients."""
    if coeffs is None:
        coeffs = analyze(f, b, window, spec)
    meeting = [j for j in basis.scales_meeting(b, K) if window.j_min <= j <= window.j_max]
    freq = max((window.k_max / 2.0**j for j in meeting), default=0.0)
    breaks = list(f.breakpoints)
    for j in meeting:
        breaks += _scaled_breakpoints(b, j)
    return l2_error(f.eval, lambda x: synthesize(coeffs, b, x), K, spec, freq, breaks)
