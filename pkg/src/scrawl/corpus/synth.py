"""Deterministic synthetic text lines rendered from the built-in glyph set."""

from collections.abc import Mapping
from dataclasses import dataclass
import logging

import numpy as np

from ..constants import DATALOGGER_NAME, IMAGE_HEIGHT
from .errors import CorpusError
from .glyphs import CELL, has_glyph, glyph_cell
from .sample import Corpus, ImageLine, Sample, Split, Transcript
from .vocabulary import Vocabulary

log = logging.getLogger(DATALOGGER_NAME)

DEFAULT_CHARSET = "adehilmnorst"
"""Twelve lowercase letters with clearly distinct glyphs."""

DEFAULT_LENGTHS = (5, 10)

MARGIN = 8
"""Background columns left and right of the text."""

BASELINE_TOP = (IMAGE_HEIGHT - CELL) // 2
"""Top row of the glyph cells on the canvas."""


@dataclass(frozen=True)
class NoiseParams:
    """Distortions applied while rendering.

    :param jitter: Maximum per-character horizontal offset in pixels.
    :param shear: Maximum horizontal shear factor of a line.
    :param sigma: Standard deviation of the additive Gaussian pixel noise.
    """

    jitter: int = 2
    shear: float = 0.15
    sigma: float = 0.05

    def __post_init__(self) -> None:
        if not 0 <= self.jitter <= MARGIN:
            raise ValueError(f"jitter must be in 0..{MARGIN}, got {self.jitter}")
        if self.shear < 0 or self.sigma < 0:
            raise ValueError("shear and sigma must not be negative")


def line_width(length: int) -> int:
    """Canvas width for ``length`` characters; always a multiple of 16."""
    return CELL * length + 2 * MARGIN


def _shear(ink: np.ndarray, factor: float) -> np.ndarray:
    """Shift every row horizontally in proportion to its distance from the middle."""
    height, width = ink.shape
    out = np.zeros_like(ink)
    for y in range(height):
        shift = int(round(factor * (height / 2 - y)))
        if shift >= 0:
            out[y, shift:] = ink[y, : width - shift]
        else:
            out[y, :shift] = ink[y, -shift:]
    return out


def render_line(text: str, rng: np.random.Generator, noise: NoiseParams = NoiseParams()) -> np.ndarray:
    """Render ``text`` on a white 64-pixel-high canvas; returns floats in [0, 1]."""
    missing = sorted({c for c in text if not has_glyph(c)})
    if missing:
        raise CorpusError(f"no glyphs for characters {missing!r}")
    width = line_width(len(text))
    ink = np.zeros((IMAGE_HEIGHT, width), dtype=bool)
    for k, char in enumerate(text):
        dx = int(rng.integers(-noise.jitter, noise.jitter + 1))
        left = MARGIN + CELL * k + dx
        ink[BASELINE_TOP : BASELINE_TOP + CELL, left : left + CELL] |= glyph_cell(char)
    if noise.shear > 0:
        ink = _shear(ink, rng.uniform(-noise.shear, noise.shear))
    pixels = np.where(ink, 0.0, 1.0)
    if noise.sigma > 0:
        pixels = pixels + rng.normal(0.0, noise.sigma, size=pixels.shape)
    return np.clip(pixels, 0.0, 1.0).astype(np.float32)


def _capacity(charset: str, lengths: tuple[int, int]) -> int:
    return sum(len(charset) ** n for n in range(lengths[0], lengths[1] + 1))


def synth_texts(
    rng: np.random.Generator, n: int, charset: str, lengths: tuple[int, int]
) -> list[str]:
    """Draw ``n`` pairwise distinct random strings; duplicates are redrawn."""
    lo, hi = lengths
    if not 1 <= lo <= hi:
        raise CorpusError(f"invalid length range {lengths}")
    if not charset:
        raise CorpusError("the character set is empty")
    if len(set(charset)) != len(charset):
        raise CorpusError(f"the character set {charset!r} repeats characters")
    if n > _capacity(charset, lengths):
        raise CorpusError(
            f"cannot draw {n} distinct strings of length {lo}..{hi} over {len(charset)} characters"
        )
    seen: set[str] = set()
    texts: list[str] = []
    while len(texts) < n:
        length = int(rng.integers(lo, hi + 1))
        text = "".join(charset[i] for i in rng.integers(0, len(charset), size=length))
        if text in seen:
            continue
        seen.add(text)
        texts.append(text)
    return texts


def synth_generate(
    seed: int,
    n: int,
    charset: str = DEFAULT_CHARSET,
    lengths: tuple[int, int] = DEFAULT_LENGTHS,
    noise: NoiseParams = NoiseParams(),
    id_prefix: str = "synth",
    vocabulary: Vocabulary | None = None,
) -> list[Sample]:
    """Generate ``n`` labelled lines, fully determined by ``seed``.

    :raises CorpusError: If a character has no glyph, or ``n`` distinct
        strings cannot be drawn.
    """
    missing = sorted({c for c in charset if not has_glyph(c)})
    if missing:
        raise CorpusError(f"no glyphs for characters {missing!r}")
    vocab = vocabulary or Vocabulary.default()
    rng = np.random.default_rng(seed)
    texts = synth_texts(rng, n, charset, lengths)
    samples = []
    for index, text in enumerate(texts):
        sample_id = f"{id_prefix}-{index:05d}"
        pixels = render_line(text, rng, noise)
        samples.append(
            Sample(
                ImageLine(sample_id, pixels, pixels.shape[1]),
                Transcript(sample_id, text, tuple(vocab.encode(text))),
            )
        )
    log.info("Generated %d synthetic lines (seed %d)", n, seed)
    return samples


def synth_corpus(
    seed: int,
    counts: Mapping[Split | str, int],
    charset: str = DEFAULT_CHARSET,
    lengths: tuple[int, int] = DEFAULT_LENGTHS,
    noise: NoiseParams = NoiseParams(),
) -> Corpus:
    """Generate one pool of distinct lines and cut it into splits in ``counts`` order."""
    samples = synth_generate(seed, sum(counts.values()), charset, lengths, noise)
    splits: dict[Split | str, list[Sample]] = {}
    start = 0
    for split, count in counts.items():
        splits[split] = samples[start : start + count]
        start += count
    return Corpus.from_mapping(splits)
