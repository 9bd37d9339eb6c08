"""Dense tensors with reverse-mode automatic differentiation."""

from .tensor import (
    GradientMap,
    Mode,
    NonFiniteError,
    ShapeError,
    Tape,
    TapeError,
    Tensor,
    backward,
    debug_checks,
    default_dtype,
    precision,
)

__all__ = [
    "GradientMap",
    "Mode",
    "NonFiniteError",
    "ShapeError",
    "Tape",
    "TapeError",
    "Tensor",
    "backward",
    "debug_checks",
    "default_dtype",
    "precision",
]
