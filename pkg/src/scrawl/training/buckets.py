"""Group samples of similar size and cut them into padded batches.

Every sample goes to the smallest bucket whose width class holds its image
and whose length class holds its target plus EOS.
"""

from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass
import logging

import numpy as np

from ..constants import EOS_ID, PAD_ID, SOS_ID
from ..corpus.sample import Sample, stack_lines

log = logging.getLogger(__name__)


class BucketError(ValueError):
    """Raised when a sample fits no bucket."""


@dataclass(frozen=True)
class Bucket:
    width: int
    length: int
    ids: tuple[str, ...]


@dataclass(frozen=True)
class Batch:
    """Padded arrays of one training batch.

    ``inputs`` start with SOS, ``targets`` end with EOS; both are padded
    with PAD up to the bucket's length class.
    """

    ids: tuple[str, ...]
    images: np.ndarray
    source_widths: np.ndarray
    inputs: np.ndarray
    targets: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def mask(self) -> np.ndarray:
        return self.targets != PAD_ID

    @property
    def steps(self) -> int:
        """Decode steps up to the last non-PAD target; later steps add nothing to the loss."""
        used = np.flatnonzero(self.mask.any(axis=0))
        return int(used[-1]) + 1 if used.size else 0


def _smallest(classes: Sequence[int], size: int) -> int | None:
    return next((c for c in sorted(classes) if c >= size), None)


def assign_buckets(
    samples: Sequence[Sample], width_classes: Sequence[int], length_classes: Sequence[int]
) -> list[Bucket]:
    """Return the non-empty buckets ordered by (width, length); members keep input order.

    :raises BucketError: Naming the first sample that exceeds every class.
    """
    members: dict[tuple[int, int], list[str]] = defaultdict(list)
    for sample in samples:
        width = _smallest(width_classes, sample.image.width)
        length = _smallest(length_classes, len(sample.transcript) + 1)
        if width is None or length is None:
            raise BucketError(
                f"sample {sample.id} (width {sample.image.width}, "
                f"{len(sample.transcript) + 1} target tokens) fits no bucket; "
                f"largest classes are {max(width_classes)} px and {max(length_classes)} tokens"
            )
        members[(width, length)].append(sample.id)
    return [Bucket(w, n, tuple(ids)) for (w, n), ids in sorted(members.items())]


def build_batch(samples: Sequence[Sample], width: int, length: int) -> Batch:
    """Pad images to ``width`` with background and token rows to ``length`` with PAD."""
    images, widths = stack_lines([s.image for s in samples], width)
    inputs = np.full((len(samples), length), PAD_ID, dtype=np.int64)
    targets = np.full((len(samples), length), PAD_ID, dtype=np.int64)
    for i, sample in enumerate(samples):
        tokens = list(sample.transcript.token_ids)
        inputs[i, : len(tokens) + 1] = [SOS_ID, *tokens]
        targets[i, : len(tokens) + 1] = [*tokens, EOS_ID]
    return Batch(tuple(s.id for s in samples), images, widths, inputs, targets)


def make_batches(
    samples: Sequence[Sample],
    width_classes: Sequence[int],
    length_classes: Sequence[int],
    batch_size: int = 4,
    seed: int = 0,
) -> list[Batch]:
    """Bucket, shuffle within buckets, batch, then shuffle the batch order.

    The schedule depends only on the samples and ``seed``.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be at least 1, got {batch_size}")
    by_id = {s.id: s for s in samples}
    rng = np.random.default_rng(seed)
    batches = []
    for bucket in assign_buckets(samples, width_classes, length_classes):
        order = rng.permutation(len(bucket.ids))
        ids = [bucket.ids[i] for i in order]
        for start in range(0, len(ids), batch_size):
            chunk = [by_id[i] for i in ids[start : start + batch_size]]
            batches.append(build_batch(chunk, bucket.width, bucket.length))
    schedule = [batches[i] for i in rng.permutation(len(batches))]
    log.debug("Scheduled %d batches for %d samples (seed %d)", len(schedule), len(samples), seed)
    return schedule
