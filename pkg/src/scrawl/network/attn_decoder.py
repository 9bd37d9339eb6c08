"""Two-layer GRU decoder with bilinear attention over the annotation grid.

One decoding step embeds the previous token, advances both GRU layers,
scores every annotation against the top layer's state, turns the scores into
weights with the configured :class:`~scrawl.models.attention.AttentionMechanism`,
forms the context vector and predicts a distribution over the vocabulary::

    e_i = a_i · (W_score s_t)
    c_t = Σ_i w(e)_i a_i
    o_t = tanh(W_comb [s_t ; c_t] + b_comb)
    p_t = softmax(W_out o_t + b_out)
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from numpy.typing import ArrayLike

from ..constants import EOS_ID, PAD_ID, SOS_ID
from ..models.attention import AttentionMechanism
from ..numerics import ops
from ..numerics.tensor import ShapeError, Tensor
from .params import ModelParams
from .seq_encoder import AnnotationGrid, final_states

log = logging.getLogger(__name__)

GRU_LAYERS = 2


class TraceError(ValueError):
    """Raised for attention traces that do not match their grid, or bad step indices."""


@dataclass(frozen=True)
class GruParams:
    """Weights of one GRU layer; gate blocks are ordered update, reset, candidate."""

    w_x: Tensor
    w_h: Tensor
    b: Tensor

    @property
    def hidden_size(self) -> int:
        return self.w_h.shape[0]

    @property
    def input_size(self) -> int:
        return self.w_x.shape[0]


def gru_cell_step(x: Tensor, h: Tensor, params: GruParams) -> Tensor:
    """Advance a GRU cell by one step.

    ``z, r = σ(W x + U h + b)``, ``h̃ = tanh(W_n x + U_n (r ⊙ h) + b_n)``,
    ``h' = (1 - z) ⊙ h + z ⊙ h̃``.
    """
    hidden = params.hidden_size
    if (
        x.ndim != 2
        or x.shape[1] != params.input_size
        or params.w_x.shape[1] != 3 * hidden
        or params.w_h.shape != (hidden, 3 * hidden)
        or params.b.shape != (3 * hidden,)
        or h.shape != (x.shape[0], hidden)
    ):
        raise ShapeError(
            f"gru_cell_step: x {x.shape}, h {h.shape} do not fit "
            f"w_x {params.w_x.shape}, w_h {params.w_h.shape}, b {params.b.shape}"
        )

    from_x = ops.add(ops.matmul(x, params.w_x), params.b)
    gates = ops.sigmoid(
        ops.add(
            ops.slice_axis(from_x, 1, 0, 2 * hidden),
            ops.matmul(h, ops.slice_axis(params.w_h, 1, 0, 2 * hidden)),
        )
    )
    z = ops.slice_axis(gates, 1, 0, hidden)
    r = ops.slice_axis(gates, 1, hidden, 2 * hidden)
    candidate = ops.tanh(
        ops.add(
            ops.slice_axis(from_x, 1, 2 * hidden, 3 * hidden),
            ops.matmul(ops.mul(r, h), ops.slice_axis(params.w_h, 1, 2 * hidden, 3 * hidden)),
        )
    )
    return ops.add(ops.mul(ops.sub(1.0, z), h), ops.mul(z, candidate))


@dataclass(frozen=True)
class DecoderParams:
    """The decoder's view of :class:`ModelParams` (the output head included)."""

    embedding: Tensor
    gru: tuple[GruParams, ...]
    init: tuple[tuple[Tensor, Tensor], ...]
    w_score: Tensor
    w_comb: Tensor
    b_comb: Tensor
    w_out: Tensor
    b_out: Tensor

    @classmethod
    def from_params(cls, params: ModelParams) -> "DecoderParams":
        return cls(
            embedding=params["dec.embedding"],
            gru=tuple(
                GruParams(
                    params[f"dec.gru{layer}.w_x"],
                    params[f"dec.gru{layer}.w_h"],
                    params[f"dec.gru{layer}.b"],
                )
                for layer in range(GRU_LAYERS)
            ),
            init=tuple(
                (params[f"dec.init{layer}.w"], params[f"dec.init{layer}.b"])
                for layer in range(GRU_LAYERS)
            ),
            w_score=params["dec.attn.w_score"],
            w_comb=params["dec.comb.w"],
            b_comb=params["dec.comb.b"],
            w_out=params["dec.out.w"],
            b_out=params["dec.out.b"],
        )

    @property
    def hidden_size(self) -> int:
        return self.gru[0].hidden_size

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0]

    @property
    def input_feeding(self) -> bool:
        """Whether the first GRU layer also reads the previous combined output."""
        return self.gru[0].input_size == self.embedding.shape[1] + self.hidden_size


@dataclass(frozen=True)
class DecoderState:
    """Hidden vectors of both GRU layers, plus ``o_{t-1}`` when input feeding."""

    layers: tuple[Tensor, ...]
    feed: Tensor | None = None

    @property
    def top(self) -> Tensor:
        return self.layers[-1]


@dataclass(frozen=True)
class StepOutput:
    """What one decoding step produces."""

    distribution: Tensor
    state: DecoderState
    weights: Tensor


def attention_scores(annotations: Tensor, state_top: Tensor, w_score: Tensor) -> Tensor:
    """Bilinear scores ``a_i · (W_score s)`` for annotations [N, S, 2E] and states [N, Hd]."""
    n, positions, features = annotations.shape
    if state_top.shape[0] != n or w_score.shape != (features, state_top.shape[1]):
        raise ShapeError(
            f"attention_scores: annotations {annotations.shape}, state {state_top.shape} "
            f"and W_score {w_score.shape} do not conform"
        )
    query = ops.matmul(state_top, ops.transpose(w_score))
    scores = ops.matmul(annotations, ops.reshape(query, (n, features, 1)))
    return ops.reshape(scores, (n, positions))


def attention_weights(
    scores: Tensor,
    mechanism: AttentionMechanism | str,
    mask: ArrayLike | None = None,
) -> Tensor:
    """Turn scores [N, S] into attention weights; masked positions get exactly 0."""
    mechanism = AttentionMechanism(mechanism)
    if mechanism is AttentionMechanism.SOFTMAX:
        return ops.softmax(scores, mask)
    weights = ops.sigmoid(scores) if mechanism is AttentionMechanism.SIGMOID else scores
    if mask is None:
        return weights
    valid = np.broadcast_to(np.asarray(mask, dtype=bool), scores.shape)
    return ops.mul(weights, Tensor(valid, dtype=scores.dtype))


def context_vector(weights: Tensor, annotations: Tensor) -> Tensor:
    """``c = Σ_i w_i a_i`` for weights [N, S] and annotations [N, S, 2E]."""
    n, positions, features = annotations.shape
    if weights.shape != (n, positions):
        raise ShapeError(
            f"context_vector: weights {weights.shape} do not fit annotations {annotations.shape}"
        )
    context = ops.matmul(ops.reshape(weights, (n, 1, positions)), annotations)
    return ops.reshape(context, (n, features))


def initial_state(annotations: AnnotationGrid, params: DecoderParams) -> DecoderState:
    """``s_0 = tanh(W m + b)`` per layer, where m is the mean valid annotation."""
    mean = final_states(annotations)
    layers = tuple(ops.tanh(ops.add(ops.matmul(mean, w), b)) for w, b in params.init)
    feed = None
    if params.input_feeding:
        feed = Tensor(np.zeros((mean.shape[0], params.hidden_size)), dtype=mean.dtype)
    return DecoderState(layers, feed)


def decode_step(
    prev_token: ArrayLike,
    state: DecoderState,
    annotations: AnnotationGrid,
    params: DecoderParams,
    mechanism: AttentionMechanism | str = AttentionMechanism.SOFTMAX,
) -> StepOutput:
    """Run one decoding step for a batch.

    :param prev_token: Integer ids [N] of the previous tokens.
    :raises IndexError: If a token id is outside the vocabulary.
    """
    tokens = np.asarray(prev_token)
    if tokens.shape != (annotations.flat.shape[0],):
        raise ShapeError(
            f"decode_step: {tokens.shape} tokens for a batch of {annotations.flat.shape[0]}"
        )
    x = ops.embedding(params.embedding, tokens)
    if state.feed is not None:
        x = ops.concat([x, state.feed], axis=-1)

    layers: list[Tensor] = []
    for gru, h in zip(params.gru, state.layers, strict=True):
        x = gru_cell_step(x, h, gru)
        layers.append(x)
    top = layers[-1]

    scores = attention_scores(annotations.flat, top, params.w_score)
    weights = attention_weights(scores, mechanism, annotations.mask)
    context = context_vector(weights, annotations.flat)
    combined = ops.tanh(
        ops.add(ops.matmul(ops.concat([top, context], axis=-1), params.w_comb), params.b_comb)
    )
    logits = ops.add(ops.matmul(combined, params.w_out), params.b_out)
    distribution = ops.softmax(logits)
    feed = combined if state.feed is not None else None
    return StepOutput(distribution, DecoderState(tuple(layers), feed), weights)


def teacher_forced(
    annotations: AnnotationGrid,
    params: DecoderParams,
    inputs: ArrayLike,
    mechanism: AttentionMechanism | str = AttentionMechanism.SOFTMAX,
) -> Tensor:
    """Decode with the given previous tokens [N, T]; returns distributions [N, T, V].

    ``inputs[:, 0]`` is SOS and ``inputs[:, t]`` the target of step ``t - 1``.
    """
    tokens = np.asarray(inputs)
    if tokens.ndim != 2 or tokens.shape[1] == 0:
        raise ShapeError(f"teacher_forced: inputs must be [N, T] with T >= 1, got {tokens.shape}")
    state = initial_state(annotations, params)
    distributions: list[Tensor] = []
    for t in range(tokens.shape[1]):
        step = decode_step(tokens[:, t], state, annotations, params, mechanism)
        distributions.append(step.distribution)
        state = step.state
    return ops.stack(distributions, axis=1)


@dataclass(frozen=True)
class AttentionTrace:
    """Attention weights of every decoding step of one line.

    ``weights[t]`` is exactly the vector that formed the context of step
    ``t``; its positions are the cells of a ``rows`` x ``cols`` grid in
    row-major order.
    """

    weights: np.ndarray
    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.weights.ndim != 2 or self.weights.shape[1] != self.rows * self.cols:
            raise TraceError(
                f"trace of shape {self.weights.shape} does not fit a "
                f"{self.rows}x{self.cols} grid"
            )

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def steps(self) -> int:
        return self.weights.shape[0]

    def grid(self, step: int) -> np.ndarray:
        """The weights of ``step`` as a [rows, cols] array."""
        if not 0 <= step < self.steps:
            raise TraceError(f"step {step} outside a trace of {self.steps} steps")
        return self.weights[step].reshape(self.rows, self.cols)

    def collapsed(self) -> np.ndarray:
        """[steps, cols]: every step's weights summed over the grid rows."""
        return self.weights.reshape(self.steps, self.rows, self.cols).sum(axis=1)


@dataclass(frozen=True)
class DecodeResult:
    """Greedy output for one line; ``tokens`` excludes the EOS."""

    tokens: tuple[int, ...]
    trace: AttentionTrace
    finished: bool = field(default=True)


def _pick_tokens(distribution: np.ndarray) -> np.ndarray:
    """Argmax per row with PAD and SOS excluded; ties go to the lowest id."""
    candidates = np.array(distribution, dtype=np.float64, copy=True)
    candidates[:, [PAD_ID, SOS_ID]] = -np.inf
    return candidates.argmax(axis=1)


def greedy_decode(
    annotations: AnnotationGrid,
    params: DecoderParams,
    max_len: int,
    mechanism: AttentionMechanism | str = AttentionMechanism.SOFTMAX,
) -> list[DecodeResult]:
    """Decode a batch greedily from SOS until EOS or ``max_len`` steps.

    Every line gets one trace row per step it took, the EOS step included,
    trimmed to the grid columns that cover the line's own image.
    """
    if max_len < 1:
        raise ValueError(f"max_len must be at least 1, got {max_len}")
    n = annotations.flat.shape[0]
    state = initial_state(annotations, params)
    previous = np.full(n, SOS_ID, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    emitted: list[list[int]] = [[] for _ in range(n)]
    rows_of: list[list[np.ndarray]] = [[] for _ in range(n)]

    for _ in range(max_len):
        step = decode_step(previous, state, annotations, params, mechanism)
        chosen = _pick_tokens(step.distribution.data)
        for i in np.flatnonzero(~done):
            rows_of[i].append(step.weights.data[i])
            if chosen[i] == EOS_ID:
                done[i] = True
            else:
                emitted[i].append(int(chosen[i]))
        if done.all():
            break
        previous = np.where(done, EOS_ID, chosen)
        state = step.state

    valid_cols = annotations.valid_columns()
    results = []
    for i in range(n):
        full = np.stack(rows_of[i]).reshape(-1, annotations.rows, annotations.cols)
        own = full[:, :, : valid_cols[i]].reshape(len(rows_of[i]), -1)
        trace = AttentionTrace(own, annotations.rows, int(valid_cols[i]))
        results.append(DecodeResult(tuple(emitted[i]), trace, bool(done[i])))
    log.debug("Greedy decoding of %d lines took at most %d steps", n, max(len(r) for r in rows_of))
    return results

