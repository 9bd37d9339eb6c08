"""Tensors, the operation tape and reverse-mode differentiation.

A :class:`Tensor` wraps a numpy array. Operations from :mod:`scrawl.numerics.ops`
record themselves on the active :class:`Tape` whenever one of their inputs
requires a gradient. :func:`backward` walks the tape in reverse and returns a
:class:`GradientMap`.

Example::

    x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
    with Tape() as tape:
        loss = ops.sum(x * x)
    grads = backward(loss, tape)
    grads[x]  # array([2., 4., 6.])
"""

from collections.abc import Callable, Iterator, Mapping, Sequence
from contextlib import contextmanager
import contextvars
from dataclasses import dataclass
from enum import StrEnum
import logging
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, DTypeLike

log = logging.getLogger(__name__)

type Backward = Callable[[np.ndarray], Sequence[np.ndarray | None]]

_DTYPE: contextvars.ContextVar[np.dtype] = contextvars.ContextVar(
    "dtype", default=np.dtype(np.float32)
)
_DEBUG_CHECKS: contextvars.ContextVar[bool] = contextvars.ContextVar(
    "debug_checks", default=False
)
_ACTIVE_TAPE: contextvars.ContextVar["Tape | None"] = contextvars.ContextVar(
    "active_tape", default=None
)


class ShapeError(ValueError):
    """Raised when operand shapes do not conform for an operation."""


class NonFiniteError(FloatingPointError):
    """Raised in debug mode when an operation produces NaN or Inf."""


class TapeError(ValueError):
    """Raised when a tensor to differentiate was not recorded on the tape."""


class Mode(StrEnum):
    """Whether a forward pass trains or infers."""

    TRAIN = "train"
    INFER = "infer"


def default_dtype() -> np.dtype:
    """Element type of newly created tensors in the current context."""
    return _DTYPE.get()


@contextmanager
def precision(dtype: DTypeLike = np.float64) -> Iterator[np.dtype]:
    """Create new tensors with ``dtype`` inside the block.

    Gradient checks run under ``precision(np.float64)``.
    """
    resolved = np.dtype(dtype)
    if resolved not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ValueError(f"unsupported element type {resolved}")
    token = _DTYPE.set(resolved)
    try:
        yield resolved
    finally:
        _DTYPE.reset(token)


@contextmanager
def debug_checks(enabled: bool = True) -> Iterator[None]:
    """Assert after every operation that its result is finite."""
    token = _DEBUG_CHECKS.set(enabled)
    try:
        yield
    finally:
        _DEBUG_CHECKS.reset(token)


def check_finite(op: str, data: np.ndarray) -> None:
    """Raise :class:`NonFiniteError` for non-finite ``data`` when debug checks are on."""
    if _DEBUG_CHECKS.get() and not np.all(np.isfinite(data)):
        raise NonFiniteError(f"{op} produced non-finite values (shape {data.shape})")


class Tensor:
    """An n-dimensional array of floats that may take part in differentiation.

    Tensors are treated as immutable values: operations always create new
    tensors and never write into their inputs' ``data``.
    """

    __slots__ = ("data", "name", "requires_grad")

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        name: str | None = None,
        dtype: DTypeLike | None = None,
    ) -> None:
        array = np.asarray(data, dtype=dtype if dtype is not None else default_dtype())
        if array.size == 0:
            raise ShapeError(f"tensor extents must be positive, got shape {array.shape}")
        self.data: np.ndarray = array
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        """Return the underlying array. Do not modify it."""
        return self.data

    def item(self) -> float:
        """Return the value of a single-element tensor."""
        if self.size != 1:
            raise ShapeError(f"item() needs a single element, tensor has shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        grad = ", requires_grad" if self.requires_grad else ""
        return f"<Tensor{label} shape={self.shape} dtype={self.dtype}{grad}>"

    # Operators delegate to scrawl.numerics.ops; imported lazily to avoid a cycle.
    def __add__(self, other: Any) -> "Tensor":  # noqa: ANN401
        from . import ops

        return ops.add(self, other)

    def __radd__(self, other: Any) -> "Tensor":  # noqa: ANN401
        from . import ops

        return ops.add(other, self)

    def __sub__(self, other: Any) -> "Tensor":  # noqa: ANN401
        from . import ops

        return ops.sub(self, other)

    def __rsub__(self, other: Any) -> "Tensor":  # noqa: ANN401
        from . import ops

        return ops.sub(other, self)

    def __mul__(self, other: Any) -> "Tensor":  # noqa: ANN401
        from . import ops

        return ops.mul(self, other)

    def __rmul__(self, other: Any) -> "Tensor":  # noqa: ANN401
        from . import ops

        return ops.mul(other, self)

    def __truediv__(self, other: float | int) -> "Tensor":
        from . import ops

        return ops.mul(self, 1.0 / other)

    def __neg__(self) -> "Tensor":
        from . import ops

        return ops.mul(self, -1.0)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from . import ops

        return ops.matmul(self, other)


@dataclass(frozen=True, slots=True)
class TapeEntry:
    """One recorded operation."""

    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    backward: Backward


class Tape:
    """Ordered record of the operations of one forward pass.

    Use it as a context manager; operations record on the innermost active
    tape. Without an active tape nothing is recorded.
    """

    def __init__(self) -> None:
        self.entries: list[TapeEntry] = []
        self._token: contextvars.Token | None = None

    def __enter__(self) -> "Tape":
        self._token = _ACTIVE_TAPE.set(self)
        return self

    def __exit__(self, *exc_info: object) -> None:
        if self._token is not None:
            _ACTIVE_TAPE.reset(self._token)
            self._token = None

    def __len__(self) -> int:
        return len(self.entries)

    def record(
        self, op: str, inputs: tuple[Tensor, ...], output: Tensor, backward: Backward
    ) -> None:
        self.entries.append(TapeEntry(op, inputs, output, backward))


def active_tape() -> Tape | None:
    """The tape operations currently record on, if any."""
    return _ACTIVE_TAPE.get()


class GradientMap(Mapping[Tensor, np.ndarray]):
    """Gradients keyed by tensor identity.

    Looking up a tensor the loss does not depend on returns zeros of the
    tensor's shape. Iteration only covers tensors that received a gradient.
    """

    def __init__(self, grads: dict[Tensor, np.ndarray]) -> None:
        self._grads = grads

    def __getitem__(self, tensor: Tensor) -> np.ndarray:
        grad = self._grads.get(tensor)
        if grad is None:
            return np.zeros_like(tensor.data)
        return grad

    def __contains__(self, tensor: object) -> bool:
        return tensor in self._grads

    def __iter__(self) -> Iterator[Tensor]:
        return iter(self._grads)

    def __len__(self) -> int:
        return len(self._grads)


def backward(loss: Tensor, tape: Tape) -> GradientMap:
    """Differentiate a scalar ``loss`` with respect to everything on ``tape``.

    Gradients of tensors that feed several operations are summed.

    :param loss: A single-element tensor produced on ``tape``.
    :param tape: The tape of the forward pass.
    :return: The gradient of ``loss`` for every tensor that requires one.
    :raises ShapeError: If ``loss`` has more than one element.
    :raises TapeError: If no operation on ``tape`` produced ``loss``.
    """
    if loss.size != 1:
        raise ShapeError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not any(entry.output is loss for entry in tape.entries):
        raise TapeError(
            "backward needs a loss recorded on the tape; it was computed outside it "
            "or from tensors that do not require gradients"
        )

    grads: dict[Tensor, np.ndarray] = {loss: np.ones_like(loss.data)}
    for entry in reversed(tape.entries):
        upstream = grads.get(entry.output)
        if upstream is None:
            continue
        for tensor, grad in zip(entry.inputs, entry.backward(upstream), strict=True):
            if grad is None or not tensor.requires_grad:
                continue
            if grad.shape != tensor.shape:
                raise ShapeError(
                    f"{entry.op} backward produced shape {grad.shape} "
                    f"for an input of shape {tensor.shape}"
                )
            previous = grads.get(tensor)
            grads[tensor] = grad if previous is None else previous + grad

    return GradientMap(grads)
