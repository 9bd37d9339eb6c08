"""Attention mechanisms of the decoder."""

from enum import StrEnum
from typing import Self


class AttentionMechanism(StrEnum):
    """How the raw attention scores are turned into weights.

    Lookups accept the member values, the alias names below and any case
    variation of them.
    """

    SOFTMAX = "softmax"
    """Normalized over the valid source positions; weights sum to 1."""

    SIGMOID = "sigmoid"
    """Independent gate per position; each weight lies in (0, 1)."""

    NONE = "none"
    """The raw bilinear scores are used as weights."""

    # Aliases
    SOFT = "softmax"
    SIG = "sigmoid"
    RAW = "none"
    IDENTITY = "none"

    @classmethod
    def _missing_(cls: type[Self], value: object) -> "AttentionMechanism | None":
        """Resolve alias names and case variations."""
        name = str(value).upper()
        member = cls.__members__.get(name)
        if member is not None:
            return member

        valid = ", ".join(name.lower() for name in cls.__members__)
        raise ValueError(
            f"{value!r} is not a valid {cls.__name__}; valid names/aliases: {valid}"
        )
