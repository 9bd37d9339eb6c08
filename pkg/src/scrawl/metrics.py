"""Edit distance, character error rate and rank correlation."""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np


def levenshtein(a: str, b: str) -> int:
    """Minimum number of insertions, deletions and substitutions turning ``a`` into ``b``.

    Works on Unicode code points with two rolling rows.

    .. code-block:: python

        >>> levenshtein("kitten", "sitting")
        3
    """
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        previous = current
    return previous[-1]


def _check_pairs(refs: Sequence[str], hyps: Sequence[str]) -> None:
    if len(refs) != len(hyps):
        raise ValueError(f"{len(refs)} references but {len(hyps)} hypotheses")
    if not any(refs):
        raise ValueError("character error rate is undefined when all references are empty")


def cer(refs: Sequence[str], hyps: Sequence[str]) -> float:
    """Pooled character error rate: summed distances over summed reference lengths.

    :raises ValueError: If the sequences differ in length or every reference is empty.
    """
    _check_pairs(refs, hyps)
    distance = sum(levenshtein(r, h) for r, h in zip(refs, hyps, strict=True))
    return distance / sum(len(r) for r in refs)


@dataclass(frozen=True)
class SampleScore:
    id: str
    ref: str
    hyp: str
    distance: int

    @property
    def cer(self) -> float:
        """Per-sample rate; an empty reference counts as length 1."""
        return self.distance / max(len(self.ref), 1)


@dataclass(frozen=True)
class EvalReport:
    """Per-sample distances of an evaluation and their pooled CER."""

    samples: tuple[SampleScore, ...]

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[SampleScore]:
        return iter(self.samples)

    @property
    def total_distance(self) -> int:
        return sum(s.distance for s in self.samples)

    @property
    def total_length(self) -> int:
        return sum(len(s.ref) for s in self.samples)

    @property
    def cer(self) -> float:
        return self.total_distance / self.total_length

    def rows(self) -> list[tuple[str, str, str, int]]:
        """``(id, ref, hyp, distance)`` rows for the result CSV."""
        return [(s.id, s.ref, s.hyp, s.distance) for s in self.samples]


def evaluate_pairs(ids: Sequence[str], refs: Sequence[str], hyps: Sequence[str]) -> EvalReport:
    """Score every hypothesis against its reference.

    :raises ValueError: Same conditions as :func:`cer`, or a different number of ids.
    """
    _check_pairs(refs, hyps)
    if len(ids) != len(refs):
        raise ValueError(f"{len(ids)} ids for {len(refs)} pairs")
    return EvalReport(
        tuple(
            SampleScore(i, r, h, levenshtein(r, h))
            for i, r, h in zip(ids, refs, hyps, strict=True)
        )
    )


def average_ranks(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size, dtype=np.float64)
    sorted_x = x[order]
    start = 0
    while start < x.size:
        stop = start + 1
        while stop < x.size and sorted_x[stop] == sorted_x[start]:
            stop += 1
        ranks[order[start:stop]] = (start + stop + 1) / 2.0
        start = stop
    return ranks


def spearman(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> float:
    """Spearman rank correlation; 0.0 when either side is constant.

    :raises ValueError: If the sequences differ in length or have fewer than two items.
    """
    if len(x) != len(y):
        raise ValueError(f"cannot correlate {len(x)} with {len(y)} values")
    if len(x) < 2:
        raise ValueError("rank correlation needs at least two values")
    rx = average_ranks(x) - (len(x) + 1) / 2.0
    ry = average_ranks(y) - (len(y) + 1) / 2.0
    denom = np.sqrt((rx**2).sum() * (ry**2).sum())
    if denom == 0.0:
        return 0.0
    return float((rx * ry).sum() / denom)
