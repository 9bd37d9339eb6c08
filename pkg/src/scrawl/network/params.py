"""Named parameter tensors of the transcription network.

Names are dotted paths, e.g. ``cnn.conv3.kernel`` or ``dec.gru1.w_h``.
Trainable tensors live in :attr:`ModelParams.tensors`; the batch-norm
running statistics live in :attr:`ModelParams.stats` and are stored in
checkpoints as ``<layer>.running_mean`` and ``<layer>.running_var``.
"""

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
import logging

import numpy as np
from numpy.typing import DTypeLike

from ..constants import GRID_STRIDE
from ..models.config import RunConfig
from ..numerics.conv import RunningStats
from ..numerics.tensor import ShapeError, Tensor

log = logging.getLogger(__name__)

_WEIGHT_SUFFIXES = (".kernel", ".w_x", ".w_h", ".w", ".w_score", ".embedding")


def is_weight(name: str) -> bool:
    """True for weight matrices and kernels (the tensors L2 applies to)."""
    return name.endswith(_WEIGHT_SUFFIXES)


def glorot_uniform(
    rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int
) -> np.ndarray:
    """Uniform in ``±sqrt(6 / (fan_in + fan_out))``."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def parameter_shapes(config: RunConfig, vocab_size: int) -> dict[str, tuple[int, ...]]:
    """Return the shape of every trainable tensor, keyed by name."""
    shapes: dict[str, tuple[int, ...]] = {}
    cnn = config.cnn
    in_channels = 1
    for layer, out_channels in enumerate(cnn.channels, start=1):
        shapes[f"cnn.conv{layer}.kernel"] = (out_channels, in_channels, cnn.kernel, cnn.kernel)
        shapes[f"cnn.conv{layer}.bias"] = (out_channels,)
        if layer in cnn.bn_after:
            shapes[f"cnn.bn{layer}.gamma"] = (out_channels,)
            shapes[f"cnn.bn{layer}.beta"] = (out_channels,)
        in_channels = out_channels

    depth, hidden = cnn.depth, config.encoder.hidden_size
    rows = config.corpus.image_height // GRID_STRIDE
    for direction in ("fwd", "bwd"):
        shapes[f"enc.{direction}.w_x"] = (depth, 4 * hidden)
        shapes[f"enc.{direction}.w_h"] = (hidden, 4 * hidden)
        shapes[f"enc.{direction}.b"] = (4 * hidden,)
        shapes[f"enc.{direction}.h0"] = (rows, hidden)
        shapes[f"enc.{direction}.c0"] = (rows, hidden)

    dec = config.decoder
    annotation = 2 * hidden
    shapes["dec.embedding"] = (vocab_size, dec.embedding_size)
    first_input = dec.embedding_size + (dec.hidden_size if dec.input_feeding else 0)
    for layer, inputs in enumerate((first_input, dec.hidden_size)):
        shapes[f"dec.gru{layer}.w_x"] = (inputs, 3 * dec.hidden_size)
        shapes[f"dec.gru{layer}.w_h"] = (dec.hidden_size, 3 * dec.hidden_size)
        shapes[f"dec.gru{layer}.b"] = (3 * dec.hidden_size,)
        shapes[f"dec.init{layer}.w"] = (annotation, dec.hidden_size)
        shapes[f"dec.init{layer}.b"] = (dec.hidden_size,)
    shapes["dec.attn.w_score"] = (annotation, dec.hidden_size)
    shapes["dec.comb.w"] = (dec.hidden_size + annotation, dec.hidden_size)
    shapes["dec.comb.b"] = (dec.hidden_size,)
    shapes["dec.out.w"] = (dec.hidden_size, vocab_size)
    shapes["dec.out.b"] = (vocab_size,)
    return dict(sorted(shapes.items()))


def _initial_value(
    name: str, shape: tuple[int, ...], rng: np.random.Generator
) -> np.ndarray:
    if name.endswith(".kernel"):
        receptive = shape[2] * shape[3]
        return glorot_uniform(rng, shape, shape[1] * receptive, shape[0] * receptive)
    if name.endswith(".gamma"):
        return np.ones(shape)
    if is_weight(name):
        return glorot_uniform(rng, shape, shape[0], shape[1])
    if name.startswith("enc.") and name.endswith(".b"):
        bias = np.zeros(shape)
        hidden = shape[0] // 4
        bias[hidden : 2 * hidden] = 1.0  # forget gate
        return bias
    return np.zeros(shape)


@dataclass
class ModelParams:
    """Every tensor of one network instance."""

    tensors: dict[str, Tensor]
    stats: dict[str, RunningStats] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Tensor:
        try:
            return self.tensors[name]
        except KeyError:
            raise KeyError(f"no parameter named {name!r}") from None

    def __contains__(self, name: object) -> bool:
        return name in self.tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    @property
    def dtype(self) -> np.dtype:
        return next(iter(self.tensors.values())).dtype

    def named_arrays(self) -> dict[str, np.ndarray]:
        """All tensors and running statistics as plain arrays, sorted by name."""
        arrays = {name: t.data for name, t in self.tensors.items()}
        for layer, stats in self.stats.items():
            arrays[f"{layer}.running_mean"] = stats.mean
            arrays[f"{layer}.running_var"] = stats.var
        return dict(sorted(arrays.items()))

    def replace(self, values: Mapping[str, np.ndarray]) -> "ModelParams":
        """Return new params with the given tensors swapped in; stats are shared."""
        tensors = dict(self.tensors)
        for name, value in values.items():
            old = self[name]
            tensors[name] = Tensor(value, requires_grad=True, name=name, dtype=old.dtype)
        return ModelParams(tensors, self.stats)

    def snapshot(self) -> "ModelParams":
        """Copy that later batch-norm statistic updates do not reach."""
        return ModelParams(
            dict(self.tensors),
            {
                layer: RunningStats(s.mean.copy(), s.var.copy(), s.momentum)
                for layer, s in self.stats.items()
            },
        )

    def astype(self, dtype: DTypeLike) -> "ModelParams":
        """Copy every tensor and statistic to ``dtype``."""
        return ModelParams(
            {
                name: Tensor(t.data.astype(dtype), requires_grad=True, name=name, dtype=dtype)
                for name, t in self.tensors.items()
            },
            {
                layer: RunningStats(s.mean.astype(dtype), s.var.astype(dtype), s.momentum)
                for layer, s in self.stats.items()
            },
        )

    @classmethod
    def from_arrays(
        cls, arrays: Mapping[str, np.ndarray], config: RunConfig, vocab_size: int
    ) -> "ModelParams":
        """Rebuild params from named arrays, checking them against ``config``.

        :raises ShapeError: If a tensor is missing, unexpected or has the
            wrong shape; the message names the tensor.
        """
        template = init_params(config, vocab_size, seed=0)
        expected = template.named_arrays()
        missing = sorted(set(expected) - set(arrays))
        unexpected = sorted(set(arrays) - set(expected))
        if missing:
            raise ShapeError(f"tensor {missing[0]!r} is missing ({len(missing)} missing in total)")
        if unexpected:
            raise ShapeError(f"tensor {unexpected[0]!r} is not part of this model")
        for name, array in expected.items():
            if arrays[name].shape != array.shape:
                raise ShapeError(
                    f"tensor {name!r} has shape {arrays[name].shape}, "
                    f"the configuration needs {array.shape}"
                )

        dtype = np.float32
        tensors = {
            name: Tensor(np.array(arrays[name], dtype=dtype), requires_grad=True, name=name)
            for name in template.tensors
        }
        stats = {
            layer: RunningStats(
                np.array(arrays[f"{layer}.running_mean"], dtype=dtype),
                np.array(arrays[f"{layer}.running_var"], dtype=dtype),
            )
            for layer in template.stats
        }
        return cls(tensors, stats)


def init_params(
    config: RunConfig, vocab_size: int, seed: int = 0, dtype: DTypeLike = np.float32
) -> ModelParams:
    """Create freshly initialized parameters.

    Matrices and kernels are Glorot-uniform, biases zero except the LSTM
    forget gates (+1), batch-norm gamma 1 and beta 0, running mean 0 and
    variance 1, per-row initial encoder states 0.
    """
    rng = np.random.default_rng(seed)
    tensors = {
        name: Tensor(_initial_value(name, shape, rng), requires_grad=True, name=name, dtype=dtype)
        for name, shape in parameter_shapes(config, vocab_size).items()
    }
    stats = {
        f"cnn.bn{layer}": RunningStats.fresh(channels, dtype)
        for layer, channels in enumerate(config.cnn.channels, start=1)
        if layer in config.cnn.bn_after
    }
    count = sum(t.size for t in tensors.values())
    log.debug("Initialized %d tensors with %d parameters (seed %d)", len(tensors), count, seed)
    return ModelParams(tensors, stats)
