"""Coherent-state quantization with complex and real Hermite polynomials."""
from .errors import (
    ConsistencyError,
    ConvergenceError,
    CSQError,
    NoSignChangeError,
    NumericalPreconditionError,
    TruncationError,
)

__all__ = [
    "CSQError",
    "ConsistencyError",
    "ConvergenceError",
    "NoSignChangeError",
    "NumericalPreconditionError",
    "TruncationError",
]
__version__ = "0.1.0"
