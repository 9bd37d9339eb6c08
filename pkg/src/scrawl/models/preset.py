"""Named model sizes."""

from enum import StrEnum
from typing import Any


class Preset(StrEnum):
    """A named set of layer widths and corpus limits."""

    DESK = "desk"
    """Small enough to train on a laptop CPU."""

    FULL = "full"
    """The full-scale handwriting configuration."""


PRESETS: dict[Preset, dict[str, Any]] = {
    Preset.DESK: {
        "cnn": {"channels": [8, 16, 16, 32, 32, 64, 64]},
        "encoder": {"hidden_size": 32},
        "decoder": {"hidden_size": 64},
    },
    Preset.FULL: {
        "cnn": {"channels": [32, 64, 64, 128, 128, 256, 256]},
        "encoder": {"hidden_size": 256},
        "decoder": {"hidden_size": 128},
        "corpus": {"max_transcript_len": 81},
    },
}
"""Preset tables, merged beneath the user's configuration."""
