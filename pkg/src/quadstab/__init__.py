"""Dynamical stability of quadratic bosonic Hamiltonians.

The package classifies ``H = xi^T V xi / 2`` by the spectrum of the
equation-of-motion matrix ``A = J V``, builds the Jordan normal forms with
their geometric splits, and applies both to linearized two-mode and
three-mode optomechanical models.
"""
from .core import (EomMatrix, QuadraticModel, check_symplectic, congruence_transform,
                   eom_matrix, symplectic_form)
from .dynamics import GaussianState, occupation_series, propagate
from .errors import (DivergedError, InternalError, InvalidArgument, InvalidModel,
                     NumericFailure, QuadstabError)
from .spectral import (Boundedness, ModeKind, boundedness_oracle, classify_spectrum,
                       is_dynamically_stable)

__version__ = "0.1.0"

__all__ = [
    "Boundedness",
    "DivergedError",
    "EomMatrix",
    "GaussianState",
    "InternalError",
    "InvalidArgument",
    "InvalidModel",
    "ModeKind",
    "NumericFailure",
    "QuadraticModel",
    "QuadstabError",
    "boundedness_oracle",
    "check_symplectic",
    "classify_spectrum",
    "congruence_transform",
    "eom_matrix",
    "is_dynamically_stable",
    "occupation_series",
    "propagate",
    "symplectic_form",
]
