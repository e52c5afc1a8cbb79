"""Spectral shift function of doubly-positive Hankel operators.

The direct map sends a sequence ``alpha`` to the SSF of the pair
``(Gamma_alpha**2, Gamma_{S*alpha}**2)``; the inverse map rebuilds ``alpha``
from a given SSF.
"""

__version__ = "0.1.0"

from .direct import (KernelClass, StepFunction, TraceReport, cauchy_residual, finite_model,
                     kernel_classification, ssf, ssf_moment_measure, trace_formulas)
from .errors import (ConditioningError, DomainError, HankelSSFError, InterlacingError,
                     InvalidMeasureError, LengthError, ModelError, NumericError, ParseError)
from .hankel import SpectralData, SymMatrix, norm_bounds_check, spectral_measure, truncate
from .inverse import (IntervalSystem, contraction_model, finite_rank_inverse, inverse, pwm,
                      roundtrip)
from .measures import recurrence_step, reconstruct_from_rho, ssf_to_rho
from .sequences import (DiscreteMeasure, RealSequence, from_moment_measure, moment_quadrature,
                        positivity_report, shift, weak_norm)

__all__ = [
    "ConditioningError", "DiscreteMeasure", "DomainError", "HankelSSFError", "IntervalSystem",
    "InterlacingError", "InvalidMeasureError", "KernelClass", "LengthError", "ModelError",
    "NumericError", "ParseError", "RealSequence", "SpectralData", "StepFunction", "SymMatrix",
    "TraceReport", "cauchy_residual", "contraction_model", "finite_model", "finite_rank_inverse",
    "from_moment_measure", "inverse", "kernel_classification", "moment_quadrature",
    "norm_bounds_check", "positivity_report", "pwm", "recurrence_step", "reconstruct_from_rho",
    "roundtrip", "shift", "spectral_measure", "ssf", "ssf_moment_measure", "ssf_to_rho",
    "trace_formulas", "truncate", "weak_norm",
]
