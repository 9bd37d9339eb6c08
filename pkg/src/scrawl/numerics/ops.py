"""Differentiable primitive operations and their composites.

Every primitive computes its result with numpy and, when any input requires
a gradient and a tape is active, records a backward rule on that tape.
Composites such as :func:`softmax` are built only from primitives, so their
gradients come for free.
"""

import builtins
from collections.abc import Sequence
import logging

import numpy as np
from numpy.typing import ArrayLike

from .tensor import Backward, ShapeError, Tensor, active_tape, check_finite

log = logging.getLogger(__name__)

type Operand = Tensor | ArrayLike


def as_tensor(value: Operand, like: Tensor | None = None) -> Tensor:
    """Wrap ``value`` in a constant tensor; tensors pass through unchanged."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value, dtype=like.dtype if like is not None else None)


def _pair(a: Operand, b: Operand) -> tuple[Tensor, Tensor]:
    like = a if isinstance(a, Tensor) else b if isinstance(b, Tensor) else None
    return as_tensor(a, like), as_tensor(b, like)


def emit(op: str, inputs: tuple[Tensor, ...], data: np.ndarray, backward: Backward) -> Tensor:
    """Wrap an op result in a tensor and record ``backward`` on the active tape."""
    check_finite(op, data)
    requires_grad = builtins.any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=requires_grad, dtype=data.dtype)
    if requires_grad:
        tape = active_tape()
        if tape is not None:
            tape.record(op, inputs, out, backward)
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` over the axes that broadcasting added or stretched."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from None


# --- Elementwise binary ops


def add(a: Operand, b: Operand) -> Tensor:
    ta, tb = _pair(a, b)
    _broadcast_shape("add", ta, tb)

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(g, ta.shape), _unbroadcast(g, tb.shape)

    return emit("add", (ta, tb), ta.data + tb.data, backward)


def sub(a: Operand, b: Operand) -> Tensor:
    ta, tb = _pair(a, b)
    _broadcast_shape("sub", ta, tb)

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(g, ta.shape), _unbroadcast(-g, tb.shape)

    return emit("sub", (ta, tb), ta.data - tb.data, backward)


def mul(a: Operand, b: Operand) -> Tensor:
    """Elementwise product."""
    ta, tb = _pair(a, b)
    _broadcast_shape("mul", ta, tb)

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(g * tb.data, ta.shape), _unbroadcast(g * ta.data, tb.shape)

    return emit("mul", (ta, tb), ta.data * tb.data, backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of the last two axes; leading axes broadcast.

    Covers ``[N,K] @ [K,M]``, batched ``[B,N,K] @ [B,K,M]`` and a shared
    right operand ``[B,N,K] @ [K,M]``.
    """
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} do not conform")
    try:
        np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    except ValueError:
        raise ShapeError(
            f"matmul: batch shapes of {a.shape} and {b.shape} do not broadcast"
        ) from None

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return emit("matmul", (a, b), np.matmul(a.data, b.data), backward)


# --- Structural ops


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    """Join tensors along an existing axis."""
    if not tensors:
        raise ShapeError("concat: no tensors given")
    ndim = tensors[0].ndim
    axis = axis % ndim
    for t in tensors:
        if t.ndim != ndim or t.shape[:axis] + t.shape[axis + 1:] != (
            tensors[0].shape[:axis] + tensors[0].shape[axis + 1:]
        ):
            raise ShapeError(
                f"concat: shapes {[t.shape for t in tensors]} differ outside axis {axis}"
            )
    splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g: np.ndarray) -> list[np.ndarray]:
        return np.split(g, splits, axis=axis)

    data = np.concatenate([t.data for t in tensors], axis=axis)
    return emit("concat", tuple(tensors), data, backward)


def slice_axis(x: Tensor, axis: int, start: int, stop: int) -> Tensor:
    """Take ``x[..., start:stop, ...]`` along one axis."""
    axis = axis % x.ndim
    if not 0 <= start < stop <= x.shape[axis]:
        raise ShapeError(f"slice: range {start}:{stop} invalid for axis {axis} of {x.shape}")
    index = (slice(None),) * axis + (slice(start, stop),)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        grad = np.zeros_like(x.data)
        grad[index] = g
        return (grad,)

    return emit("slice", (x,), x.data[index], backward)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        data = x.data.reshape(tuple(shape))
    except ValueError:
        raise ShapeError(f"reshape: cannot reshape {x.shape} into {tuple(shape)}") from None

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g.reshape(x.shape),)

    return emit("reshape", (x,), data, backward)


def transpose(x: Tensor, axes: Sequence[int] | None = None) -> Tensor:
    order = tuple(axes) if axes is not None else tuple(reversed(range(x.ndim)))
    if sorted(order) != list(range(x.ndim)):
        raise ShapeError(f"transpose: {order} is not a permutation of the axes of {x.shape}")
    inverse = tuple(np.argsort(order))

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (np.transpose(g, inverse),)

    return emit("transpose", (x,), np.transpose(x.data, order), backward)


def _reduced_axes(x: Tensor, axis: int | Sequence[int] | None) -> tuple[int, ...]:
    if axis is None:
        return tuple(range(x.ndim))
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    return tuple(sorted(a % x.ndim for a in axes))


def sum(x: Tensor, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    axes = _reduced_axes(x, axis)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g, x.shape).copy(),)

    return emit("sum", (x,), x.data.sum(axis=axes, keepdims=keepdims), backward)


def mean(x: Tensor, axis: int | Sequence[int] | None = None, keepdims: bool = False) -> Tensor:
    axes = _reduced_axes(x, axis)
    count = int(np.prod([x.shape[a] for a in axes]))
    return mul(sum(x, axes, keepdims), 1.0 / count)


# --- Elementwise unary ops


def relu(x: Tensor) -> Tensor:
    active = x.data > 0

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g * active,)

    return emit("relu", (x,), np.where(active, x.data, 0).astype(x.dtype), backward)


def sigmoid(x: Tensor) -> Tensor:
    # 0.5 * (1 + tanh(x / 2)) never overflows and gives exactly 0.5 at 0.
    out = (0.5 * (1.0 + np.tanh(0.5 * x.data))).astype(x.dtype)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g * out * (1.0 - out),)

    return emit("sigmoid", (x,), out, backward)


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.data)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g * (1.0 - out * out),)

    return emit("tanh", (x,), out, backward)


def exp(x: Tensor) -> Tensor:
    out = np.exp(x.data)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g * out,)

    return emit("exp", (x,), out, backward)


def log(x: Tensor) -> Tensor:
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(x.data)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (g / x.data,)

    return emit("log", (x,), out, backward)


def embedding(table: Tensor, ids: ArrayLike) -> Tensor:
    """Look up rows of ``table`` ([V, D]) for integer ``ids`` of any shape."""
    index = np.asarray(ids)
    if table.ndim != 2:
        raise ShapeError(f"embedding: table must be 2-D, got shape {table.shape}")
    if not np.issubdtype(index.dtype, np.integer):
        raise TypeError(f"embedding: ids must be integers, got {index.dtype}")
    if index.size and (index.min() < 0 or index.max() >= table.shape[0]):
        bad = sorted({int(i) for i in index.reshape(-1) if not 0 <= i < table.shape[0]})
        raise IndexError(f"embedding: ids {bad} out of range for {table.shape[0]} rows")

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        grad = np.zeros_like(table.data)
        np.add.at(grad, index, g)
        return (grad,)

    return emit("embedding", (table,), table.data[index], backward)


# --- Composites


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """Join equally shaped tensors along a new axis."""
    ndim = tensors[0].ndim + 1
    axis = axis % ndim
    expanded = [reshape(t, t.shape[:axis] + (1,) + t.shape[axis:]) for t in tensors]
    return concat(expanded, axis=axis)


def index_axis(x: Tensor, axis: int, i: int) -> Tensor:
    """Take position ``i`` of ``axis`` and drop that axis."""
    axis = axis % x.ndim
    part = slice_axis(x, axis, i, i + 1)
    return reshape(part, x.shape[:axis] + x.shape[axis + 1:])


def softmax(x: Tensor, mask: ArrayLike | None = None) -> Tensor:
    """Softmax along the last axis, optionally restricted to ``mask``.

    The maximum over the valid positions is subtracted first, so large
    scores never overflow. Positions where ``mask`` is false get exactly 0.

    :param x: Scores of any shape.
    :param mask: Boolean array broadcastable to ``x``; every row needs at
        least one true entry.
    """
    if mask is None:
        shift = x.data.max(axis=-1, keepdims=True)
        z = sub(x, Tensor(shift, dtype=x.dtype))
        e = exp(z)
        return exp(sub(z, log(sum(e, axis=-1, keepdims=True))))

    valid = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
    if not valid.any(axis=-1).all():
        raise ValueError("softmax: a row has no valid position")
    weights = Tensor(valid, dtype=x.dtype)
    shift = np.where(valid, x.data, -np.inf).max(axis=-1, keepdims=True)
    z = mul(sub(x, Tensor(shift, dtype=x.dtype)), weights)
    e = mul(exp(z), weights)
    return mul(exp(sub(z, log(sum(e, axis=-1, keepdims=True)))), weights)


def softmax_vector(scores: Tensor) -> Tensor:
    """Softmax of a 1-D score vector."""
    if scores.ndim != 1:
        raise ShapeError(f"softmax_vector: expected a vector, got shape {scores.shape}")
    return softmax(scores)


def dropout(x: Tensor, p: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout: zero each element with probability ``p``, scale the rest.

    The expected value of the output equals ``x``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dropout probability must be in [0, 1], got {p}")
    if p == 0.0:
        return x
    if p == 1.0:
        return mul(x, np.zeros(x.shape, dtype=x.dtype))
    keep = (rng.random(x.shape) >= p).astype(x.dtype) / x.dtype.type(1.0 - p)
    return mul(x, Tensor(keep, dtype=x.dtype))
