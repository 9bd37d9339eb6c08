"""Common utilities for tests."""

from collections.abc import Generator
from contextlib import contextmanager
import os
from pathlib import Path
from typing import Any

from scrawl.corpus.synth import NoiseParams
from scrawl.models.config import RunConfig

TINY_MODEL: dict[str, Any] = {
    "cnn": {"channels": [2, 2, 2, 2, 2, 2, 3], "dropout_p": 0.0},
    "encoder": {"hidden_size": 4},
    "decoder": {"hidden_size": 5, "embedding_size": 6, "max_decode_len": 12},
    "training": {"epochs": 1, "batch_size": 2},
    "max_workers": 1,
}
"""A model small enough for a training epoch in well under a second."""

LIGHT_NOISE = NoiseParams(jitter=1, shear=0.05, sigma=0.02)


def tiny_config(**sections: Any) -> RunConfig:  # noqa: ANN401
    """Return a :class:`RunConfig` built from :data:`TINY_MODEL` with sections replaced."""
    data = {**TINY_MODEL}
    for name, value in sections.items():
        if isinstance(value, dict) and isinstance(data.get(name), dict):
            data[name] = {**data[name], **value}
        else:
            data[name] = value
    return RunConfig.from_dict(data)


@contextmanager
def changedir(path: str | Path) -> Generator[None, Any, None]:
    """Switch to a new directory and restore the original one afterwards."""
    pwd = os.getcwd()
    try:
        os.chdir(path)
        yield
    finally:
        os.chdir(pwd)
