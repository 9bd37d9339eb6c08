"""Load trained models and run them on single line images."""

import logging
from pathlib import Path

from ..corpus.pgm import read_pgm
from ..corpus.preprocess import preprocess_image
from ..corpus.sample import ImageLine
from ..models.config import RunConfig
from ..network.model import Transcriber, Transcription
from ..training.checkpoint import load_checkpoint

log = logging.getLogger(__name__)


def load_transcriber(
    checkpoint: Path | str,
    config: RunConfig | None = None,
    local: RunConfig | None = None,
) -> Transcriber:
    """Build a model from a checkpoint file.

    :param config: Use this architecture instead of the one in the
        checkpoint header; the stored tensors must fit it.
    :param local: Take worker count, paths and logging from here.
    :raises CheckpointError: If the file is unreadable or a tensor does not fit.
    """
    ck = load_checkpoint(checkpoint, config)
    log.info("Loaded %s (epoch %d, %s attention)", checkpoint, ck.epoch, ck.config.attention)
    used = ck.config.with_machine(local) if local is not None else ck.config
    return Transcriber(used, ck.params, ck.vocabulary)


def load_line_image(path: Path | str, height: int) -> ImageLine:
    """Read a PGM file and preprocess it like a corpus image.

    :raises OSError: If the file cannot be read.
    :raises PgmError: If it is not a binary PGM image.
    """
    path = Path(path)
    raw, maxval = read_pgm(path)
    return preprocess_image(raw, maxval, path.stem, height)


def transcribe_file(model: Transcriber, path: Path | str) -> tuple[ImageLine, Transcription]:
    """Preprocess one image and greedy-decode it."""
    line = load_line_image(path, model.config.corpus.image_height)
    (result,) = model.transcribe_lines([line])
    if not result.finished:
        log.warning("%s: no end token within %d steps", path, model.config.decoder.max_decode_len)
    return line, result
