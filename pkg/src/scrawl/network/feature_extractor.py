"""The seven-layer convolutional feature extractor."""

from dataclasses import dataclass
import logging

import numpy as np

from ..constants import GRID_STRIDE
from ..models.config import CnnConfig
from ..numerics import ops
from ..numerics.conv import batch_norm, conv2d, maxpool2x2
from ..numerics.tensor import Mode, Tensor
from .params import ModelParams

log = logging.getLogger(__name__)


class ExtractorInputError(ValueError):
    """Raised for images the extractor cannot process."""


def output_shape(h: int, w: int) -> tuple[int, int]:
    """Return the feature-grid extents for an ``h`` x ``w`` input image.

    >>> output_shape(64, 800)
    (4, 50)
    """
    if h <= 0 or w <= 0 or h % GRID_STRIDE or w % GRID_STRIDE:
        raise ExtractorInputError(
            f"image extents must be positive multiples of {GRID_STRIDE}, got {h}x{w}"
        )
    return h // GRID_STRIDE, w // GRID_STRIDE


def valid_columns(source_widths: tuple[int, ...] | np.ndarray, cols: int) -> np.ndarray:
    """Grid columns covered by each image before padding: ``ceil(w / 16)``, at least 1."""
    widths = np.asarray(source_widths, dtype=np.int64)
    return np.clip(-(-widths // GRID_STRIDE), 1, cols)


@dataclass(frozen=True)
class FeatureGrid:
    """The CNN output V with the pre-padding width of every batch element."""

    values: Tensor
    source_widths: tuple[int, ...]

    @property
    def rows(self) -> int:
        return self.values.shape[2]

    @property
    def cols(self) -> int:
        return self.values.shape[3]

    def column_mask(self) -> np.ndarray:
        """Boolean [N, W'] marking the columns that cover real image content."""
        valid = valid_columns(self.source_widths, self.cols)
        return np.arange(self.cols)[None, :] < valid[:, None]


def extract_features(
    images: Tensor,
    params: ModelParams,
    config: CnnConfig,
    mode: Mode = Mode.INFER,
    rng_seed: int | np.random.SeedSequence | None = None,
    source_widths: tuple[int, ...] | None = None,
) -> FeatureGrid:
    """Run the convolution stack over a batch of line images.

    Every layer is conv (stride 1, same padding), then batch norm for the
    layers in ``config.bn_after``, ReLU, and 2x2 max pooling for the layers
    in ``config.pool_after``. In train mode inverted dropout with
    ``config.dropout_p`` is applied to the final activations.

    :param images: Pixels in [0, 1] of shape [N, 1, H, W].
    :param params: Network parameters holding the ``cnn.*`` tensors.
    :param config: Layer layout.
    :param mode: ``train`` updates the batch-norm statistics and drops out.
    :param rng_seed: Seed of the dropout mask; required in train mode.
    :param source_widths: Width of every image before padding; defaults to W.
    :raises ExtractorInputError: For misshaped images or a missing seed.
    """
    mode = Mode(mode)
    if images.ndim != 4 or images.shape[1] != 1:
        raise ExtractorInputError(f"expected images of shape [N, 1, H, W], got {images.shape}")
    n, _, h, w = images.shape
    output_shape(h, w)
    if images.data.min() < 0.0 or images.data.max() > 1.0:
        raise ExtractorInputError("pixel values must lie in [0, 1]")
    if mode is Mode.TRAIN and rng_seed is None:
        raise ExtractorInputError("train mode needs a dropout seed")
    widths = tuple(source_widths) if source_widths is not None else (w,) * n
    if len(widths) != n:
        raise ExtractorInputError(f"{len(widths)} source widths given for {n} images")

    pad = (config.kernel - 1) // 2
    x = images
    for layer in range(1, len(config.channels) + 1):
        x = conv2d(
            x, params[f"cnn.conv{layer}.kernel"], params[f"cnn.conv{layer}.bias"], pad=pad
        )
        if layer in config.bn_after:
            x = batch_norm(
                x,
                params[f"cnn.bn{layer}.gamma"],
                params[f"cnn.bn{layer}.beta"],
                params.stats[f"cnn.bn{layer}"],
                mode,
            )
        x = ops.relu(x)
        if layer in config.pool_after:
            x, _ = maxpool2x2(x)

    if mode is Mode.TRAIN:
        x = ops.dropout(x, config.dropout_p, np.random.default_rng(rng_seed))

    return FeatureGrid(x, widths)
