"""Composite Gauss-Legendre quadrature for oscillatory, compactly supported integrands.

Oscillation is handled by subdividing proportionally to the frequency; known
kinks are passed as breakpoints so every panel sees a smooth integrand. The
error estimate compares a rule with its one-level refinement (all panels
halved).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class NonConvergentWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class QuadSpec:
    points_per_panel: int = 16
    panels_per_cycle: int = 4
    tol: float = 1e-11
    max_refinements: int = 12
    max_nodes: int = 1_000_000

    def __post_init__(self):
        if self.points_per_panel < 2:
            raise ValueError("points_per_panel must be >= 2")
        if self.panels_per_cycle < 1:
            raise ValueError("panels_per_cycle must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be >= 0")


@dataclass
class QuadResult:
    value: complex | np.ndarray
    err_est: float
    converged: bool
    panels: int

    def __iter__(self):
        # allows ``value, err = integrate(...)``
        yield self.value
        yield self.err_est


@lru_cache(maxsize=32)
def _gauss_legendre(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _segments(a, b, breakpoints):
    inner = sorted({float(p) for p in breakpoints if a < p < b})
    return [a] + inner + [b]


def panel_edges(a, b, osc_freq=0.0, spec=QuadSpec(), breakpoints=(), level=0):
    """Panel edges on ``[a, b]``: at least ``panels_per_cycle * (|f| (b - a) + 1)``
    panels at level 0, split at the breakpoints, times ``2**level``."""
    if not (0 <= a < b < math.inf):
        raise ValueError(f"need 0 <= a < b < inf, got [{a}, {b}]")
    cuts = _segments(float(a), float(b), breakpoints)
    total = b - a
    edges = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        length = hi - lo
        n = math.ceil(spec.panels_per_cycle * (abs(osc_freq) * length + length / total) - 1e-12)
        n = max(n, 1) * 2**level
        edges.append(np.linspace(lo, hi, n + 1)[:-1])
    edges.append(np.array([b], dtype=float))
    return np.concatenate(edges)


def rule(a, b, osc_freq=0.0, spec=QuadSpec(), breakpoints=(), level=0):
    """Nodes and weights of the composite rule (nodes ascending)."""
    edges = panel_edges(a, b, osc_freq, spec, breakpoints, level)
    t, w = _gauss_legendre(spec.points_per_panel)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _accept(err, value, tol):
    # absolute below unit scale, relative above it
    scale = float(np.max(np.abs(value))) if np.size(value) else 0.0
    return err <= tol * max(1.0, scale)


_CHUNK = 4096


def _apply(g, nodes, weights):
    # chunked over nodes to bound memory for row-valued integrands;
    # chunks are reduced in ascending order
    total = None
    for start in range(0, len(nodes), _CHUNK):
        part = np.asarray(g(nodes[start:start + _CHUNK])) @ weights[start:start + _CHUNK]
        total = part if total is None else total + part
    return total


def _refine(level_value, spec):
    """Refine until consecutive levels agree; ``level_value(r) -> (value, n_nodes)``."""
    coarse, n_nodes = level_value(0)
    fine, err = coarse, math.inf
    for level in range(1, spec.max_refinements + 1):
        fine, n_nodes = level_value(level)
        err = float(np.max(np.abs(fine - coarse))) if np.size(fine) else 0.0
        if _accept(err, fine, spec.tol):
            return QuadResult(fine, err, True, n_nodes // spec.points_per_panel)
        if 2 * n_nodes > spec.max_nodes:
            break
        coarse = fine
    return QuadResult(fine, err, False, n_nodes // spec.points_per_panel)


def integrate(g, interval, osc_freq=0.0, spec=QuadSpec(), breakpoints=()):
    """Integrate ``g`` over ``interval``.

    ``g`` maps a 1-D node array to values whose last axis runs over the nodes,
    so vector-valued integrands (a whole row of coefficients) are integrated
    in one pass. Non-convergence is reported through ``converged=False``
    rather than raised.
    """
    a, b = interval

    def level_value(level):
        nodes, weights = rule(a, b, osc_freq, spec, breakpoints, level)
        return _apply(g, nodes, weights), len(weights)

    return _refine(level_value, spec)


_BLOCK = 16


def _moments_on_nodes(g_w, nodes, ks, period):
    # sum_x g_w(x) exp(2 pi i k x / period) with k = 16 a + r split so only
    # (#a + 16) exponentials per node are evaluated; the rest is one matmul
    hi, lo = np.divmod(ks, _BLOCK)
    hi_vals, hi_idx = np.unique(hi, return_inverse=True)
    t = nodes / period
    coarse = np.exp(2j * np.pi * np.multiply.outer(_BLOCK * hi_vals, t))
    fine = np.exp(2j * np.pi * np.multiply.outer(np.arange(_BLOCK), t)) * g_w
    table = coarse @ fine.T
    return table[hi_idx, lo]


def fourier_moments(g, interval, ks, period, spec=QuadSpec(), breakpoints=()):
    """``int g(x) exp(2 pi i k x / period) dx`` for every integer ``k`` in ``ks``.

    Equivalent to :func:`integrate` on the row-valued integrand but evaluates
    the exponentials in factored form.
    """
    a, b = interval
    ks = np.asarray(ks, dtype=np.int64)
    freq = float(np.max(np.abs(ks))) / period if ks.size else 0.0

    def level_value(level):
        nodes, weights = rule(a, b, freq, spec, breakpoints, level)
        total = np.zeros(len(ks), dtype=complex)
        for start in range(0, len(nodes), _CHUNK):
            sl = slice(start, start + _CHUNK)
            g_w = np.asarray(g(nodes[sl])) * weights[sl]
            total += _moments_on_nodes(g_w, nodes[sl], ks, period)
        return total, len(weights)

    return _refine(level_value, spec)


def refinement_errors(g, interval, osc_freq=0.0, spec=QuadSpec(), breakpoints=(), levels=4):
    """Error estimates ``|I_{r+1} - I_r|`` for ``r = 0 .. levels - 1``."""
    a, b = interval
    values = [_apply(g, *rule(a, b, osc_freq, spec, breakpoints, r)) for r in range(levels + 1)]
    return [float(np.max(np.abs(v1 - v0))) for v0, v1 in zip(values[:-1], values[1:])]


def l2_error(f, g, interval, spec=QuadSpec(), osc_freq=0.0, breakpoints=(), full_output=False):
    """``(int |f - g|^2)^{1/2}`` over ``interval``."""
    res = integrate(lambda x: np.abs(np.asarray(f(x)) - np.asarray(g(x))) ** 2,
                    interval, osc_freq, spec, breakpoints)
    if not res.converged:
        warnings.warn(f"l2_error did not converge (err_est={res.err_est:.2e})",
                      NonConvergentWarning, stacklevel=2)
    value = math.sqrt(max(float(np.real(res.value)), 0.0))
    if full_output:
        return value, res
    return value


def integrate_products(rows_a, rows_b, interval, osc_freq=0.0, spec=QuadSpec(), breakpoints=()):
    """Matrix of integrals ``int A_p(x) conj(B_q(x)) dx``.

    ``rows_a(x)`` and ``rows_b(x)`` return arrays of shape ``(p, len(x))`` and
    ``(q, len(x))``; the product is formed as one weighted matrix multiply per
    refinement level.
    """
    a, b = interval

    def level_value(level):
        nodes, weights = rule(a, b, osc_freq, spec, breakpoints, level)
        total = None
        for start in range(0, len(nodes), _CHUNK):
            sl = slice(start, start + _CHUNK)
            A = np.asarray(rows_a(nodes[sl]))
            B = np.asarray(rows_b(nodes[sl]))
            part = (A * weights[sl]) @ np.conj(B).T
            total = part if total is None else total + part
        return total, len(weights)

    return _refine(level_value, spec)
