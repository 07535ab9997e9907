"""Truncated matrix trigonometric moment problem on the unit circle, with gaps.

Moments ``S_0..S_d`` are turned into a finite model space, an isometric block
shift and its unitary extensions. Constant unitary parameters give atomic
solutions; :mod:`tmtmp.gap` searches for solutions vanishing on open arcs.
"""

from .gap import (
    Arc,
    GapSet,
    class_check,
    conjugate_set,
    constant_candidate_search,
    gap_mass,
    make_arc,
    regular_type_certificate,
    szeta_qzeta,
    w_tilde,
)
from .model import NotRegularError, build_isometry, build_model_space, deficiency, inner, solve_model
from .moments import MomentSequence, build_toeplitz, hermitian_extend, psd_check
from .resolvent import (
    AtomicMeasure,
    SchurParameter,
    atomic_measure,
    extend,
    invert_transform,
    measure_transform,
    transform_eval,
    transform_evaluator,
    verify_moments,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "AtomicMeasure",
    "GapSet",
    "MomentSequence",
    "NotRegularError",
    "SchurParameter",
    "atomic_measure",
    "build_isometry",
    "build_model_space",
    "build_toeplitz",
    "class_check",
    "conjugate_set",
    "constant_candidate_search",
    "deficiency",
    "extend",
    "gap_mass",
    "hermitian_extend",
    "inner",
    "invert_transform",
    "make_arc",
    "measure_transform",
    "psd_check",
    "regular_type_certificate",
    "solve_model",
    "szeta_qzeta",
    "transform_eval",
    "transform_evaluator",
    "verify_moments",
    "w_tilde",
]
