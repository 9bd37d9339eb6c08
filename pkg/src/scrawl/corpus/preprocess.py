"""Binarization, height normalization and width padding of line images."""

import logging

import numpy as np

from ..constants import GRID_STRIDE, IMAGE_HEIGHT
from .sample import ImageLine

log = logging.getLogger(__name__)


def otsu_threshold(raw: np.ndarray, raw_max: int) -> int | None:
    """Return the gray level that maximizes the between-class variance.

    Pixels ``<= T`` form one class, pixels ``> T`` the other. Ties go to the
    lowest level. Returns ``None`` when the image has a single gray level.
    """
    levels = np.asarray(raw, dtype=np.int64).reshape(-1)
    if levels.size == 0 or levels.min() == levels.max():
        return None
    hist = np.bincount(levels, minlength=raw_max + 1).astype(np.float64)
    p = hist / hist.sum()
    omega = np.cumsum(p)
    mu = np.cumsum(p * np.arange(p.size))
    mu_total = mu[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        between = (mu_total * omega - mu) ** 2 / (omega * (1.0 - omega))
    between = np.nan_to_num(between, nan=0.0, posinf=0.0)
    between[omega >= 1.0] = 0.0
    return int(np.argmax(between))


def binarize(raw: np.ndarray, threshold: int) -> np.ndarray:
    """Background (``> T``) becomes 1.0; ink keeps its shade as ``v / (T + 1)``."""
    values = np.asarray(raw, dtype=np.float64)
    return np.where(values > threshold, 1.0, values / (threshold + 1.0))


def resize_bilinear(pixels: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resampling with half-pixel centers and edge clamping."""
    src_h, src_w = pixels.shape

    def axis(dst: int, src: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pos = (np.arange(dst) + 0.5) * (src / dst) - 0.5
        pos = np.clip(pos, 0.0, src - 1)
        lo = np.floor(pos).astype(np.int64)
        hi = np.minimum(lo + 1, src - 1)
        return lo, hi, pos - lo

    y0, y1, fy = axis(height, src_h)
    x0, x1, fx = axis(width, src_w)
    top = pixels[y0][:, x0] * (1 - fx) + pixels[y0][:, x1] * fx
    bottom = pixels[y1][:, x0] * (1 - fx) + pixels[y1][:, x1] * fx
    return top * (1 - fy)[:, None] + bottom * fy[:, None]


def scaled_width(src_h: int, src_w: int, height: int = IMAGE_HEIGHT) -> int:
    """Width that keeps the aspect ratio at the target height, at least 1."""
    return max(1, round(src_w * height / src_h))


def pad_width(pixels: np.ndarray, multiple: int = GRID_STRIDE) -> np.ndarray:
    """Pad on the right with background (1.0) up to a multiple of ``multiple``."""
    missing = -pixels.shape[1] % multiple
    if not missing:
        return pixels
    return np.pad(pixels, ((0, 0), (0, missing)), constant_values=1.0)


def preprocess_image(
    raw: np.ndarray, raw_max: int, id: str = "", height: int = IMAGE_HEIGHT  # noqa: A002
) -> ImageLine:
    """Turn a raw gray image into a normalized :class:`ImageLine`.

    Otsu binarization, bilinear rescale to ``height`` with the aspect ratio
    kept, right padding with background to a multiple of 16. An image with a
    single gray level is treated as blank: it becomes all background and is
    flagged.
    """
    raw = np.asarray(raw)
    if raw.ndim != 2 or raw.size == 0:
        raise ValueError(f"{id or 'image'}: expected a non-empty 2-D array, got shape {raw.shape}")
    src_h, src_w = raw.shape
    width = scaled_width(src_h, src_w, height)

    threshold = otsu_threshold(raw, raw_max)
    if threshold is None:
        log.warning("Image %s has a single gray level; treating it as blank", id or "<unnamed>")
        pixels = pad_width(np.ones((height, width)))
        return ImageLine(id, pixels.astype(np.float32), width, blank=True)

    binary = binarize(raw, threshold)
    if (src_h, src_w) != (height, width):
        binary = resize_bilinear(binary, height, width)
    pixels = np.clip(pad_width(binary), 0.0, 1.0).astype(np.float32)
    return ImageLine(id, pixels, width)
