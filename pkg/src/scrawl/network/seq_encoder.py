"""Row-wise bidirectional LSTM over the feature grid.

Every row of the grid V is an independent sequence of W' feature vectors.
All H' rows of all N images run as one batch of N*H' sequences; the hidden
states of both directions are concatenated into the annotation grid, which
the decoder attends over in row-major order.
"""

from dataclasses import dataclass
import logging
from typing import Literal

import numpy as np

from ..numerics import ops
from ..numerics.tensor import Mode, ShapeError, Tensor
from .feature_extractor import FeatureGrid
from .params import ModelParams

log = logging.getLogger(__name__)

type Direction = Literal["fwd", "bwd"]


@dataclass(frozen=True)
class LstmParams:
    """Weights of one LSTM direction; gate blocks are ordered input, forget, cell, output."""

    w_x: Tensor
    w_h: Tensor
    b: Tensor

    @property
    def hidden_size(self) -> int:
        return self.w_h.shape[0]

    @classmethod
    def from_params(cls, params: ModelParams, direction: Direction) -> "LstmParams":
        prefix = f"enc.{direction}"
        return cls(params[f"{prefix}.w_x"], params[f"{prefix}.w_h"], params[f"{prefix}.b"])


def lstm_cell_step(
    x: Tensor, h: Tensor, c: Tensor, params: LstmParams
) -> tuple[Tensor, Tensor]:
    """Advance an LSTM cell by one position.

    :param x: Inputs [N, D].
    :param h: Hidden state [N, E].
    :param c: Cell state [N, E].
    :return: The new ``(h, c)``.
    """
    hidden = params.hidden_size
    if (
        x.ndim != 2
        or x.shape[1] != params.w_x.shape[0]
        or params.w_x.shape[1] != 4 * hidden
        or params.w_h.shape != (hidden, 4 * hidden)
        or params.b.shape != (4 * hidden,)
        or h.shape != (x.shape[0], hidden)
        or c.shape != h.shape
    ):
        raise ShapeError(
            f"lstm_cell_step: x {x.shape}, h {h.shape}, c {c.shape} do not fit "
            f"w_x {params.w_x.shape}, w_h {params.w_h.shape}, b {params.b.shape}"
        )

    gates = ops.add(ops.add(ops.matmul(x, params.w_x), ops.matmul(h, params.w_h)), params.b)

    def block(k: int) -> Tensor:
        return ops.slice_axis(gates, 1, k * hidden, (k + 1) * hidden)

    i = ops.sigmoid(block(0))
    f = ops.sigmoid(block(1))
    g = ops.tanh(block(2))
    o = ops.sigmoid(block(3))
    c_next = ops.add(ops.mul(f, c), ops.mul(i, g))
    h_next = ops.mul(o, ops.tanh(c_next))
    return h_next, c_next


@dataclass(frozen=True)
class AnnotationGrid:
    """The re-encoded grid Ṽ and its row-major flattened view.

    ``flat[n, i]`` is grid cell ``(i // cols, i % cols)``; ``mask[n, i]`` is
    false for cells in padding columns.
    """

    values: Tensor
    flat: Tensor
    mask: np.ndarray

    @classmethod
    def from_values(cls, values: Tensor, column_mask: np.ndarray) -> "AnnotationGrid":
        """Build the grid from values [N, H', W', 2E] and a column mask [N, W']."""
        n, rows, cols, features = values.shape
        if column_mask.shape != (n, cols):
            raise ShapeError(
                f"column mask {column_mask.shape} does not fit annotations {values.shape}"
            )
        flat = ops.reshape(values, (n, rows * cols, features))
        mask = np.broadcast_to(column_mask[:, None, :], (n, rows, cols)).reshape(n, rows * cols)
        return cls(values, flat, mask.copy())

    @property
    def rows(self) -> int:
        return self.values.shape[1]

    @property
    def cols(self) -> int:
        return self.values.shape[2]

    @property
    def features(self) -> int:
        return self.values.shape[3]

    @property
    def positions(self) -> int:
        return self.rows * self.cols

    def flat_index(self, row: int, col: int) -> int:
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise IndexError(f"cell ({row}, {col}) outside a {self.rows}x{self.cols} grid")
        return row * self.cols + col

    def unflatten(self, index: int) -> tuple[int, int]:
        if not 0 <= index < self.positions:
            raise IndexError(f"position {index} outside a grid of {self.positions} cells")
        return divmod(index, self.cols)

    def valid_columns(self) -> np.ndarray:
        """Number of unmasked columns per batch element."""
        return self.mask.reshape(-1, self.rows, self.cols)[:, 0, :].sum(axis=1)


def _run_direction(
    sequence: Tensor,
    row_ids: np.ndarray,
    params: ModelParams,
    direction: Direction,
    keep: np.ndarray,
) -> list[Tensor]:
    lstm = LstmParams.from_params(params, direction)
    h0_table = params[f"enc.{direction}.h0"]
    c0_table = params[f"enc.{direction}.c0"]
    h0 = ops.embedding(h0_table, row_ids)
    c0 = ops.embedding(c0_table, row_ids)
    h, c = h0, c0
    width = sequence.shape[1]
    order = range(width) if direction == "fwd" else range(width - 1, -1, -1)

    states: dict[int, Tensor] = {}
    for t in order:
        h, c = lstm_cell_step(ops.index_axis(sequence, 1, t), h, c, lstm)
        if direction == "bwd" and not keep[:, t].all():
            # Padding columns keep the initial state.
            on = Tensor(keep[:, t : t + 1], dtype=h.dtype)
            off = Tensor(~keep[:, t : t + 1], dtype=h.dtype)
            h = ops.add(ops.mul(h, on), ops.mul(h0, off))
            c = ops.add(ops.mul(c, on), ops.mul(c0, off))
        states[t] = h
    return [states[t] for t in range(width)]


def encode_rows(
    grid: FeatureGrid,
    params: ModelParams,
    mode: Mode = Mode.INFER,
    dropout_p: float = 0.0,
    rng: np.random.Generator | None = None,
) -> AnnotationGrid:
    """Re-encode every row of ``grid`` with a forward and a backward LSTM.

    The initial state of each direction is learned per row index. In train
    mode with ``dropout_p > 0`` inverted dropout is applied to the
    annotations, drawing from ``rng``.
    """
    mode = Mode(mode)
    n, depth, rows, cols = grid.values.shape
    if params["enc.fwd.h0"].shape[0] != rows:
        raise ShapeError(
            f"encoder has initial states for {params['enc.fwd.h0'].shape[0]} rows, "
            f"the feature grid has {rows}"
        )
    if mode is Mode.TRAIN and dropout_p > 0.0 and rng is None:
        raise ValueError("encoder dropout in train mode needs a random generator")

    # [N, D, H', W'] -> [N*H', W', D], sequence n*H' + r is row r of image n.
    sequence = ops.reshape(
        ops.transpose(grid.values, (0, 2, 3, 1)), (n * rows, cols, depth)
    )
    row_ids = np.tile(np.arange(rows), n)
    column_mask = grid.column_mask()
    keep = np.repeat(column_mask, rows, axis=0)

    forward = _run_direction(sequence, row_ids, params, "fwd", keep)
    backward = _run_direction(sequence, row_ids, params, "bwd", keep)
    per_position = [ops.concat([f, b], axis=-1) for f, b in zip(forward, backward, strict=True)]
    hidden2 = per_position[0].shape[-1]
    values = ops.reshape(ops.stack(per_position, axis=1), (n, rows, cols, hidden2))

    if mode is Mode.TRAIN and dropout_p > 0.0:
        values = ops.dropout(values, dropout_p, rng)
    return AnnotationGrid.from_values(values, column_mask)


def final_states(annotations: AnnotationGrid) -> Tensor:
    """Mean of the valid flattened annotations of every batch element, [N, 2E]."""
    counts = annotations.mask.sum(axis=1)
    if (counts == 0).any():
        empty = np.flatnonzero(counts == 0).tolist()
        raise ValueError(f"batch elements {empty} have no valid annotation positions")
    flat = annotations.flat
    weights = (annotations.mask / counts[:, None]).astype(flat.dtype)
    weighted = ops.mul(flat, Tensor(weights[:, :, None], dtype=flat.dtype))
    return ops.sum(weighted, axis=1)
