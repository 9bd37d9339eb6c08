"""The complete transcription network: extractor, encoder and decoder."""

from collections.abc import Sequence
from dataclasses import dataclass
import logging

import numpy as np
from numpy.typing import ArrayLike

from ..corpus.sample import ImageLine, stack_lines
from ..corpus.vocabulary import Vocabulary
from ..models.attention import AttentionMechanism
from ..models.config import RunConfig
from ..numerics.tensor import Mode, Tensor
from ..utils.concurrency import map_ordered
from .attn_decoder import (
    AttentionTrace,
    DecoderParams,
    greedy_decode,
    teacher_forced,
)
from .feature_extractor import extract_features
from .params import ModelParams, init_params
from .seq_encoder import AnnotationGrid, encode_rows

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Transcription:
    """The decoded text of one line and how attention moved while decoding it."""

    text: str
    tokens: tuple[int, ...]
    trace: AttentionTrace
    finished: bool


class Transcriber:
    """Binds a configuration, its parameters and the vocabulary.

    .. code-block:: python

        model = Transcriber.initialize(config, Vocabulary.default())
        lines = model.transcribe(images, widths)
    """

    def __init__(self, config: RunConfig, params: ModelParams, vocabulary: Vocabulary) -> None:
        self.config = config
        self.params = params
        self.vocabulary = vocabulary

    @classmethod
    def initialize(cls, config: RunConfig, vocabulary: Vocabulary) -> "Transcriber":
        """Create a model with fresh parameters drawn from ``config.seed``."""
        return cls(config, init_params(config, len(vocabulary), config.seed), vocabulary)

    @property
    def mechanism(self) -> AttentionMechanism:
        return self.config.attention

    def with_params(self, params: ModelParams) -> "Transcriber":
        return Transcriber(self.config, params, self.vocabulary)

    def encode(
        self,
        images: ArrayLike,
        source_widths: ArrayLike | None = None,
        mode: Mode = Mode.INFER,
        seed: np.random.SeedSequence | None = None,
    ) -> AnnotationGrid:
        """Run extractor and encoder over images [N, 1, H, W].

        Train mode needs ``seed``; the extractor and encoder dropout masks
        draw from two children of it.
        """
        mode = Mode(mode)
        pixels = Tensor(images, dtype=self.params.dtype)
        widths = None if source_widths is None else tuple(int(w) for w in np.asarray(source_widths))
        cnn_seed, enc_seed = seed.spawn(2) if seed is not None else (None, None)
        grid = extract_features(
            pixels, self.params, self.config.cnn, mode, rng_seed=cnn_seed, source_widths=widths
        )
        rng = np.random.default_rng(enc_seed) if enc_seed is not None else None
        return encode_rows(grid, self.params, mode, self.config.encoder.dropout_p, rng)

    def forward(
        self,
        images: ArrayLike,
        source_widths: ArrayLike,
        decoder_inputs: ArrayLike,
        mode: Mode = Mode.TRAIN,
        seed: np.random.SeedSequence | None = None,
    ) -> Tensor:
        """Teacher-forced pass; returns distributions [N, T, V]."""
        annotations = self.encode(images, source_widths, mode, seed)
        return teacher_forced(
            annotations, DecoderParams.from_params(self.params), decoder_inputs, self.mechanism
        )

    def transcribe(
        self,
        images: ArrayLike,
        source_widths: ArrayLike | None = None,
        max_len: int | None = None,
    ) -> list[Transcription]:
        """Greedy-decode a batch of preprocessed images."""
        annotations = self.encode(images, source_widths, Mode.INFER)
        results = greedy_decode(
            annotations,
            DecoderParams.from_params(self.params),
            max_len or self.config.decoder.max_decode_len,
            self.mechanism,
        )
        return [
            Transcription(self.vocabulary.decode(r.tokens), r.tokens, r.trace, r.finished)
            for r in results
        ]

    def transcribe_lines(
        self,
        lines: Sequence[ImageLine],
        batch_size: int = 16,
        max_workers: int = 1,
        max_len: int | None = None,
    ) -> list[Transcription]:
        """Transcribe preprocessed lines in fixed batches of ``batch_size``.

        Batches are cut in input order, so the result does not depend on
        ``max_workers``.
        """
        if batch_size < 1:
            raise ValueError(f"batch_size must be at least 1, got {batch_size}")
        chunks = [lines[i : i + batch_size] for i in range(0, len(lines), batch_size)]

        def run(chunk: Sequence[ImageLine]) -> list[Transcription]:
            images, widths = stack_lines(chunk)
            return self.transcribe(images, widths, max_len)

        log.debug("Transcribing %d lines in %d batches", len(lines), len(chunks))
        return [t for batch in map_ordered(run, chunks, max_workers) for t in batch]
