"""scikit-learn style wrappers around the analysis map, the table classifier and the designer.

Inputs ``X`` are sequences of :class:`~psi_lab.functions.SampledFunction`
objects or corpus ids; coefficient outputs are complex arrays of shape
``(n_inputs, n_j, 2 k_max + 1)``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .classify import COEFF_LAMBDAS, DEFAULT_NS, FUNCTION_LAMBDAS, classify_coeffs, classify_function
from .config import ConfigError, check_positive, check_window, resolve_bell
from .corpus import FLAGS, resolve_input
from .designer import DesignConfig, design
from .functions import SampledFunction
from .quadrature import QuadSpec
from .transform import CoeffArray, analyze, synthesize


def check_functions(X):
    """List of :class:`SampledFunction`; strings are resolved as corpus ids."""
    if isinstance(X, (SampledFunction, str)):
        X = [X]
    out = []
    for item in X:
        if isinstance(item, str):
            try:
                item = resolve_input(item)
            except KeyError:
                raise ValueError(f"unknown input id {item!r}") from None
        if not isinstance(item, SampledFunction):
            raise TypeError(f"expected SampledFunction or corpus id, got {type(item).__name__}")
        out.append(item)
    if not out:
        raise ValueError("empty input")
    return out


class HalfLineWaveletTransform(TransformerMixin, BaseEstimator):
    """Analysis map onto a fixed index window, with truncated synthesis as inverse.

    Parameters
    ----------
    bell : str or BellProfile
    jmin, jmax, kmax : int
        Index window.
    tol : float
        Quadrature tolerance.
    eval_points : array_like or None
        Abscissae for :meth:`inverse_transform`; defaults to 512 points
        spread over the window's frequency span.
    threads : int or None
    """

    def __init__(self, bell="meyer", jmin=-4, jmax=4, kmax=64, tol=1e-11, eval_points=None,
                 threads=None):
        self.bell = bell
        self.jmin = jmin
        self.jmax = jmax
        self.kmax = kmax
        self.tol = tol
        self.eval_points = eval_points
        self.threads = threads

    def fit(self, X=None, y=None):
        try:
            self.bell_ = resolve_bell(self.bell)
            self.window_ = check_window(self.jmin, self.jmax, self.kmax)
            self.spec_ = QuadSpec(tol=check_positive("tol", self.tol))
        except ConfigError as exc:
            raise ValueError(str(exc)) from None
        if self.eval_points is None:
            lo = 2.0**self.window_.j_min * self.bell_.support_lo
            hi = 2.0**self.window_.j_max * self.bell_.support_hi
            self.eval_points_ = np.geomspace(lo, hi, 512)
        else:
            self.eval_points_ = np.asarray(self.eval_points, dtype=float)
        return self

    def transform_arrays(self, X):
        """List of :class:`CoeffArray`, one per input."""
        check_is_fitted(self, "window_")
        return [analyze(f, self.bell_, self.window_, self.spec_, self.threads)
                for f in check_functions(X)]

    def transform(self, X):
        return np.stack([c.values for c in self.transform_arrays(X)])

    def inverse_transform(self, C):
        """Synthesis at ``eval_points_``; rows match the leading axis of ``C``."""
        check_is_fitted(self, "window_")
        C = np.asarray(C, dtype=complex)
        if C.ndim == 2:
            C = C[None]
        if C.shape[1:] != self.window_.shape:
            raise ValueError(f"coefficient shape {C.shape[1:]} != window {self.window_.shape}")
        return np.stack([synthesize(CoeffArray(self.window_, v, self.bell_.bell_id),
                                    self.bell_, self.eval_points_) for v in C])


class TableClassifier(BaseEstimator):
    """Predict table flags, as a boolean matrix with columns :data:`classes_`.

    ``side="function"`` classifies via X-sweeps; ``side="coefficients"``
    analyses each input on the window first and classifies the array.
    """

    classes_ = np.array(FLAGS)

    def __init__(self, side="function", bell="meyer", jmin=-4, jmax=4, kmax=256,
                 lambdas=None, ns=DEFAULT_NS, T=20, threads=None):
        self.side = side
        self.bell = bell
        self.jmin = jmin
        self.jmax = jmax
        self.kmax = kmax
        self.lambdas = lambdas
        self.ns = ns
        self.T = T
        self.threads = threads

    def fit(self, X=None, y=None):
        if self.side not in ("function", "coefficients"):
            raise ValueError(f"side must be 'function' or 'coefficients', got {self.side!r}")
        if self.side == "coefficients":
            self.transformer_ = HalfLineWaveletTransform(
                self.bell, self.jmin, self.jmax, self.kmax, threads=self.threads).fit()
        self.fitted_ = True
        return self

    def verdicts(self, X):
        check_is_fitted(self, "fitted_")
        out = []
        for f in check_functions(X):
            if self.side == "function":
                lams = FUNCTION_LAMBDAS if self.lambdas is None else self.lambdas
                out.append(classify_function(f, lams, self.ns, T=self.T, threads=self.threads))
            else:
                lams = COEFF_LAMBDAS if self.lambdas is None else self.lambdas
                c = self.transformer_.transform_arrays([f])[0]
                out.append(classify_coeffs(c, lams, self.ns))
        return out

    def predict(self, X):
        return np.array([[v.flags[f] for f in FLAGS] for v in self.verdicts(X)], dtype=bool)


class BellDesigner(BaseEstimator):
    """Fit a spline bell to the orthonormality residuals; see :func:`psi_lab.designer.design`."""

    def __init__(self, support=(0.25, 3.0), n_basis=20, degree=3, weights=(1.0, 1.0, 1.0),
                 mu=1e-4, max_iters=200, samples_per_unit=64):
        self.support = support
        self.n_basis = n_basis
        self.degree = degree
        self.weights = weights
        self.mu = mu
        self.max_iters = max_iters
        self.samples_per_unit = samples_per_unit

    def fit(self, X=None, y=None, init=None):
        cfg = DesignConfig(tuple(self.support), int(self.n_basis), int(self.degree),
                           tuple(self.weights), float(self.mu), int(self.max_iters),
                           int(self.samples_per_unit))
        self.result_ = design(init, cfg)
        self.profile_ = self.result_.profile
        self.trace_ = self.result_.trace
        self.status_ = self.result_.status
        return self
