"""Compare analytic gradients with central finite differences."""

from collections.abc import Callable
import logging

import numpy as np

from .tensor import ShapeError, Tape, Tensor, backward

log = logging.getLogger(__name__)


def numeric_gradient(f: Callable[[Tensor], Tensor], x: np.ndarray, eps: float) -> np.ndarray:
    """Central differences ``(f(x + eps) - f(x - eps)) / 2 eps`` per element."""
    grad = np.zeros_like(x)
    probe = x.copy()
    flat_probe = probe.reshape(-1)
    flat_grad = grad.reshape(-1)
    for i in range(flat_probe.size):
        original = flat_probe[i]
        flat_probe[i] = original + eps
        upper = f(Tensor(probe.copy(), dtype=x.dtype)).item()
        flat_probe[i] = original - eps
        lower = f(Tensor(probe.copy(), dtype=x.dtype)).item()
        flat_probe[i] = original
        flat_grad[i] = (upper - lower) / (2.0 * eps)
    return grad


def finite_diff_check(f: Callable[[Tensor], Tensor], x: Tensor, eps: float = 1e-5) -> float:
    """Return the largest relative error between analytic and numeric gradients.

    The relative error of one element is ``|a - n| / max(|a|, |n|, 1e-8)``.

    :param f: Scalar-valued function of one tensor, built from differentiable ops.
    :param x: The point to check at; must be float64.
    :param eps: Step of the central differences.
    :raises ValueError: If ``x`` is not float64.
    :raises ShapeError: If ``f`` does not return a single element.
    """
    if x.dtype != np.float64:
        raise ValueError(f"gradient checks need float64 input, got {x.dtype}")

    point = Tensor(x.data.copy(), requires_grad=True, dtype=np.float64)
    with Tape() as tape:
        out = f(point)
    if out.size != 1:
        raise ShapeError(f"finite_diff_check needs a scalar function, got shape {out.shape}")
    analytic = backward(out, tape)[point] if out.requires_grad else np.zeros_like(point.data)

    numeric = numeric_gradient(f, x.data.astype(np.float64), eps)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    error = float(np.max(np.abs(analytic - numeric) / scale))
    log.debug("finite_diff_check over %d elements: max relative error %.3g", x.size, error)
    return error
