"""Attention visualization."""

from .attention import (
    alignment_linearity,
    attention_centroids,
    overlay_attention,
    render_attention_matrix,
    write_trace_images,
)

__all__ = [
    "alignment_linearity",
    "attention_centroids",
    "overlay_attention",
    "render_attention_matrix",
    "write_trace_images",
]
