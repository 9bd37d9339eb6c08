"""Corpus data types."""

from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np


class Split(StrEnum):
    """The three corpus partitions."""

    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


@dataclass(frozen=True)
class ImageLine:
    """A preprocessed text-line image: 0.0 is ink, 1.0 is background.

    ``pixels`` is already padded on the right to a multiple of 16;
    ``source_width`` is the width before that padding.
    """

    id: str
    pixels: np.ndarray
    source_width: int
    blank: bool = False

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class Transcript:
    """The ground truth of a line and its token ids (without SOS/EOS)."""

    id: str
    text: str
    token_ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.token_ids)


@dataclass(frozen=True)
class Sample:
    """An image paired with its transcript."""

    image: ImageLine
    transcript: Transcript

    @property
    def id(self) -> str:
        return self.image.id

    @property
    def text(self) -> str:
        return self.transcript.text


@dataclass
class Corpus:
    """Samples per split, each list sorted by id."""

    splits: dict[Split, list[Sample]] = field(default_factory=dict)

    def __getitem__(self, split: Split | str) -> list[Sample]:
        return self.splits.get(Split(split), [])

    def __iter__(self) -> Iterator[Split]:
        return iter(self.splits)

    def counts(self) -> dict[str, int]:
        return {str(split): len(samples) for split, samples in self.splits.items()}

    @classmethod
    def from_mapping(cls, splits: Mapping[Split | str, list[Sample]]) -> "Corpus":
        return cls({Split(name): sorted(samples, key=lambda s: s.id) for name, samples in splits.items()})


def stack_lines(lines: Sequence[ImageLine], width: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Batch images into [N, 1, H, W], right-padded with background.

    :param width: Target width; defaults to the widest image.
    :return: The pixel batch and the source widths.
    :raises ValueError: If heights differ or an image is wider than ``width``.
    """
    heights = {line.height for line in lines}
    if len(heights) != 1:
        raise ValueError(f"cannot batch images of heights {sorted(heights)}")
    target = width if width is not None else max(line.width for line in lines)
    too_wide = [line.id for line in lines if line.width > target]
    if too_wide:
        raise ValueError(f"images wider than {target}: {', '.join(too_wide)}")
    batch = np.ones((len(lines), 1, heights.pop(), target), dtype=np.float32)
    for i, line in enumerate(lines):
        batch[i, 0, :, : line.width] = line.pixels
    return batch, np.array([line.source_width for line in lines], dtype=np.int64)
