"""Numerical laboratory for band-limited wavelet expansions on the half-line (0, inf)."""

from .basis import BasisIndex, IndexWindow, eval_psi, scales_meeting, support
from .bells import (BellProfile, SplineProfile, get_profile, make_meyer, make_shannon,
                    make_spline, mollified_shannon)
from .bounds import (BoundReport, geometric_sum, verify_duality, verify_isoXY, verify_lemma1,
                     verify_lemma2)
from .classify import TableVerdict, classify_coeffs, classify_function, coherence_check
from .corpus import FLAGS, corpus, get_entry
from .designer import DesignConfig, design, objective, residuals
from .estimators import BellDesigner, HalfLineWaveletTransform, TableClassifier
from .functions import PointMass, SampledFunction, indicator, point_mass, polynomial_window
from .quadrature import QuadSpec, integrate, l2_error
from .seminorms import NormSweep, cn_seminorm, s_norm, weight, x_norm, y_norm
from .transform import (CoeffArray, analyze, gram, parseval_defect, reconstruction_error,
                        synthesize)

__version__ = "0.1.0"
