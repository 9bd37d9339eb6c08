"""Render attention traces as grayscale PGM images.

The matrix view has one row per decoding step and one column per grid
column, with the weights summed over the grid rows. The overlay view blends
one step's weights, upsampled to pixel resolution, over the line image.
"""

import logging
from pathlib import Path

import numpy as np

from ..constants import GRID_STRIDE
from ..corpus.pgm import to_gray8, write_pgm
from ..metrics import spearman
from ..network.attn_decoder import AttentionTrace, TraceError

log = logging.getLogger(__name__)

OVERLAY_ALPHA = 0.6


def attention_matrix(trace: AttentionTrace) -> np.ndarray:
    """[steps, cols] weights summed over grid rows and scaled to [0, 1] by min-max.

    A constant matrix maps to all zeros.
    """
    matrix = trace.collapsed().astype(np.float64)
    low, high = matrix.min(), matrix.max()
    if high <= low:
        log.warning("Attention matrix is constant (%.4g); rendering it black", low)
        return np.zeros_like(matrix)
    return (matrix - low) / (high - low)


def render_attention_matrix(trace: AttentionTrace, out_path: Path | str) -> Path:
    """Write :func:`attention_matrix` as an 8-bit PGM of ``steps`` x ``cols`` pixels."""
    return write_pgm(out_path, to_gray8(attention_matrix(trace)))


def step_heatmap(trace: AttentionTrace, step: int) -> np.ndarray:
    """The weights of ``step`` at pixel resolution, in [0, 1].

    Negative weights become 0, the rest are divided by the step's maximum
    and every grid cell is repeated over its 16x16 pixels.

    :raises TraceError: If ``step`` is outside the trace.
    """
    weights = np.clip(trace.grid(step).astype(np.float64), 0.0, None)
    peak = weights.max()
    if peak > 0:
        weights = weights / peak
    block = np.ones((GRID_STRIDE, GRID_STRIDE))
    return np.kron(weights, block)


def overlay_pixels(pixels: np.ndarray, trace: AttentionTrace, step: int, alpha: float = OVERLAY_ALPHA) -> np.ndarray:
    """Blend ``pixel * (1 - alpha) + alpha * weight``, clamped to [0, 1].

    Columns right of the trace's grid get weight 0. The result has the
    shape of ``pixels``.
    """
    heat = step_heatmap(trace, step)
    height, width = pixels.shape
    if heat.shape[0] != height or heat.shape[1] > width:
        raise TraceError(
            f"a {trace.rows}x{trace.cols} attention grid does not cover an image of {height}x{width}"
        )
    weights = np.zeros((height, width))
    weights[:, : heat.shape[1]] = heat
    return np.clip(pixels * (1.0 - alpha) + alpha * weights, 0.0, 1.0)


def overlay_attention(
    pixels: np.ndarray, trace: AttentionTrace, step: int, out_path: Path | str
) -> Path:
    """Write :func:`overlay_pixels` of one step as an 8-bit PGM."""
    return write_pgm(out_path, to_gray8(overlay_pixels(pixels, trace, step)))


def write_trace_images(
    pixels: np.ndarray,
    trace: AttentionTrace,
    out_dir: Path | str,
    stem: str,
    step: int | None = None,
) -> list[Path]:
    """Write ``<stem>.attention.pgm`` and one ``<stem>.step-NNN.pgm`` per step (or just ``step``)."""
    out_dir = Path(out_dir)
    written = [render_attention_matrix(trace, out_dir / f"{stem}.attention.pgm")]
    steps = range(trace.steps) if step is None else [step]
    for k in steps:
        written.append(overlay_attention(pixels, trace, k, out_dir / f"{stem}.step-{k:03d}.pgm"))
    log.debug("Wrote %d attention images for %s", len(written), stem)
    return written


def attention_centroids(trace: AttentionTrace) -> np.ndarray:
    """Weighted mean grid column of every step; NaN for a step without positive weight."""
    columns = np.clip(trace.collapsed().astype(np.float64), 0.0, None)
    totals = columns.sum(axis=1)
    positions = columns @ np.arange(trace.cols, dtype=np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(totals > 0, positions / totals, np.nan)


def alignment_linearity(trace: AttentionTrace) -> float:
    """Spearman correlation between step index and attention centroid.

    Steps without a centroid are left out; fewer than two remaining steps
    give 0.0.
    """
    centroids = attention_centroids(trace)
    steps = np.flatnonzero(np.isfinite(centroids))
    if steps.size < 2:
        return 0.0
    return spearman(steps, centroids[steps])
