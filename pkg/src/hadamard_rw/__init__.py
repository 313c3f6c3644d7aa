"""Hadamard quantum walk and its equivalent four-row random-walk model."""

from .errors import ConfigError, GuardViolation, WalkError
from .kernels import BACKEND
from .operators import BoundaryMode, build_quantum_step, build_rw_step
from .scalar import DyadicRoot2, DyadicVector, QSqrt2, Scale, ScalarMode

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundaryMode",
    "ConfigError",
    "DyadicRoot2",
    "DyadicVector",
    "GuardViolation",
    "QSqrt2",
    "Scale",
    "ScalarMode",
    "WalkError",
    "build_quantum_step",
    "build_rw_step",
]
