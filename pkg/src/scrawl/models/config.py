"""Pydantic model for the run configuration."""

import os
from pathlib import Path
from typing import Any, Self

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    field_validator,
    model_validator,
)

from ..config import canonical
from ..config.merge import deep_merge
from ..constants import (
    DEFAULT_LOG_DIR,
    DEFAULT_MAX_DECODE_LEN,
    GRID_STRIDE,
    IMAGE_HEIGHT,
    LENGTH_CLASSES,
    WIDTH_CLASSES,
)
from ..logging import DEFAULT_LOGGING_CONFIG
from .attention import AttentionMechanism
from .logging import AppLoggingConfig
from .preset import PRESETS, Preset

CNN_LAYERS = 7
POOL_AFTER: tuple[int, ...] = (1, 2, 4, 6)
BN_AFTER: tuple[int, ...] = (3, 5, 7)

_SECTION = ConfigDict(extra="forbid")


class CnnConfig(BaseModel):
    """The seven-layer convolutional feature extractor."""

    model_config = _SECTION

    channels: list[PositiveInt] = Field(
        default_factory=lambda: list(PRESETS[Preset.DESK]["cnn"]["channels"]),
        min_length=CNN_LAYERS,
        max_length=CNN_LAYERS,
        title="Output channels of the seven convolution layers",
    )
    kernel: PositiveInt = Field(3, title="Odd spatial kernel extent")
    pool_after: tuple[int, ...] = Field(
        POOL_AFTER, title="Layers followed by 2x2 max pooling"
    )
    bn_after: tuple[int, ...] = Field(
        BN_AFTER, title="Layers with batch normalization"
    )
    dropout_p: float = Field(0.5, ge=0.0, le=1.0, title="Dropout on the feature grid")

    @field_validator("kernel")
    @classmethod
    def _odd_kernel(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"kernel must be odd to keep the spatial size, got {value}")
        return value

    @model_validator(mode="after")
    def _check_layer_sets(self) -> Self:
        pool, bn = set(self.pool_after), set(self.bn_after)
        if pool & bn:
            raise ValueError(f"layers {sorted(pool & bn)} both pool and normalize")
        if pool | bn != set(range(1, CNN_LAYERS + 1)):
            raise ValueError("pool_after and bn_after together must cover layers 1..7")
        if len(pool) != 4:
            raise ValueError("exactly four pooling layers are required")
        return self

    @property
    def depth(self) -> int:
        """Channels of the feature grid."""
        return self.channels[-1]


class EncoderConfig(BaseModel):
    """The row-wise bidirectional LSTM."""

    model_config = _SECTION

    hidden_size: PositiveInt = Field(32, title="Hidden units per direction (E)")
    dropout_p: float = Field(0.0, ge=0.0, le=1.0, title="Dropout on the annotations")


class DecoderConfig(BaseModel):
    """The two-layer GRU decoder and its output head."""

    model_config = _SECTION

    hidden_size: PositiveInt = Field(64, title="GRU hidden units (Hd)")
    embedding_size: PositiveInt = Field(300, title="Character embedding dimension")
    input_feeding: bool = Field(
        False, title="Feed the previous combined output back into the first GRU"
    )
    max_decode_len: PositiveInt = Field(
        DEFAULT_MAX_DECODE_LEN, title="Maximum tokens emitted by greedy decoding"
    )


class OptimizerConfig(BaseModel):
    """Adadelta with global gradient-norm clipping."""

    model_config = _SECTION

    rho: float = Field(0.95, gt=0.0, lt=1.0)
    eps: PositiveFloat = 1e-6
    lr: float = Field(1.0, ge=0.0)
    clip_norm: PositiveFloat = 5.0
    l2: float = Field(0.0, ge=0.0, title="L2 penalty added to weight gradients")


def _check_classes(values: list[int], multiple: int, name: str) -> list[int]:
    if not values:
        raise ValueError(f"{name} must not be empty")
    if any(b <= a for a, b in zip(values, values[1:], strict=False)):
        raise ValueError(f"{name} must be strictly increasing")
    bad = [value for value in values if value <= 0 or value % multiple]
    if bad:
        raise ValueError(f"{name} must be positive multiples of {multiple}: {bad}")
    return values


class TrainingConfig(BaseModel):
    """Epoch scheduling and bucketing."""

    model_config = _SECTION

    epochs: NonNegativeInt = 100
    batch_size: PositiveInt = 4
    width_classes: list[int] = Field(default_factory=lambda: list(WIDTH_CLASSES))
    length_classes: list[int] = Field(default_factory=lambda: list(LENGTH_CLASSES))

    @field_validator("width_classes")
    @classmethod
    def _check_widths(cls, value: list[int]) -> list[int]:
        return _check_classes(value, GRID_STRIDE, "width_classes")

    @field_validator("length_classes")
    @classmethod
    def _check_lengths(cls, value: list[int]) -> list[int]:
        return _check_classes(value, 1, "length_classes")


class CorpusConfig(BaseModel):
    """Image geometry and transcript limits."""

    model_config = _SECTION

    image_height: PositiveInt = Field(IMAGE_HEIGHT, title="Normalized line height")
    max_transcript_len: PositiveInt = Field(
        127, title="Longest accepted transcript in characters"
    )
    expected_split_sizes: dict[str, NonNegativeInt] | None = Field(
        None, title="Split sizes to warn about when the loaded counts differ"
    )

    @field_validator("image_height")
    @classmethod
    def _height_multiple(cls, value: int) -> int:
        if value % GRID_STRIDE:
            raise ValueError(f"image_height must be a multiple of {GRID_STRIDE}")
        return value


class PathsConfig(BaseModel):
    """Output locations."""

    model_config = _SECTION

    out_dir: Path = Field(Path("runs"), title="Directory for checkpoints and CSV files")
    log_dir: Path = Field(DEFAULT_LOG_DIR, title="Directory for debug log files")


class RunConfig(BaseModel):
    """Root model of a training or inference run (:file:`scrawl.toml`)."""

    model_config = ConfigDict(extra="forbid")

    preset: Preset = Field(Preset.DESK, title="Named layer widths")
    seed: int = Field(0, ge=0, lt=2**63, title="Seed of every random choice")
    attention: AttentionMechanism = Field(
        AttentionMechanism.SOFTMAX, title="Attention mechanism"
    )
    max_workers: int = Field(
        default="half",  # type: ignore
        validate_default=True,
        description="Max concurrent workers. Supports integers or 'all', 'half'.",
    )

    cnn: CnnConfig = Field(default_factory=CnnConfig)
    encoder: EncoderConfig = Field(default_factory=EncoderConfig)
    decoder: DecoderConfig = Field(default_factory=DecoderConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    corpus: CorpusConfig = Field(default_factory=CorpusConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)
    logging: AppLoggingConfig = Field(
        default_factory=lambda: AppLoggingConfig.model_validate(DEFAULT_LOGGING_CONFIG),
        description="Configuration for the application's logging system.",
    )

    @model_validator(mode="before")
    @classmethod
    def _apply_preset(cls, data: Any) -> Any:  # noqa: ANN401
        """Merge the preset table beneath the user's values."""
        if not isinstance(data, dict):
            return data
        preset = Preset(data.get("preset", Preset.DESK))
        return deep_merge(PRESETS[preset], data)

    @field_validator("max_workers", mode="before")
    @classmethod
    def _resolve_worker_count(cls, v: int | str) -> int:
        """Resolve keywords 'all' and 'half' into concrete integers."""
        cpu_count = os.cpu_count() or 1
        keyword_map = {
            "all": cpu_count,
            "half": max(1, cpu_count // 2),
        }

        if isinstance(v, str):
            val = v.lower()
            if val in keyword_map:
                return keyword_map[val]
            if not val.isdigit():
                raise ValueError(
                    f"Invalid max_workers value: '{v}'. Use an integer, 'all', or 'half'."
                )
            v = int(val)

        if v < 1:
            raise ValueError("max_workers must be at least 1")
        return v

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Self:
        """Create a RunConfig instance from a dictionary."""
        return cls.model_validate(data)

    def model_table(self) -> dict[str, Any]:
        """Return the sections that determine the model and its training.

        This is what a checkpoint records; ``paths``, ``logging`` and
        ``max_workers`` belong to the machine, not the model.
        """
        return self.model_dump(
            mode="json", exclude={"paths", "logging", "max_workers"}, exclude_none=True
        )

    def with_machine(self, local: "RunConfig") -> Self:
        """Copy with the ``paths``, ``logging`` and ``max_workers`` of ``local``."""
        return self.model_copy(
            update={"paths": local.paths, "logging": local.logging, "max_workers": local.max_workers}
        )

    def canonical_text(self) -> str:
        """Return the canonical key-sorted text form of the whole configuration."""
        return canonical.dumps(self.model_dump(mode="json", by_alias=True, exclude_none=True))

    @classmethod
    def from_canonical_text(cls, text: str) -> Self:
        """Parse the output of :meth:`canonical_text`."""
        return cls.model_validate(canonical.loads(text))
