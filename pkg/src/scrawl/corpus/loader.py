"""Read and write the on-disk corpus layout.

A corpus directory holds::

    images/<id>.pgm         one binary PGM per line image
    transcripts.tsv         id<TAB>text, one line per sample
    splits/<split>.txt      the ids of a split, one per line
"""

from collections.abc import Mapping
from pathlib import Path
import logging

from ..constants import (
    CORPUS_IMAGES_DIR,
    CORPUS_SPLITS_DIR,
    CORPUS_TRANSCRIPTS_FILE,
    DATALOGGER_NAME,
)
from ..models.config import CorpusConfig
from ..utils.concurrency import TaskFailedError, map_ordered
from ..utils.csvfile import read_transcripts, write_transcripts
from .errors import CorpusError
from .pgm import read_pgm, write_pgm
from .preprocess import preprocess_image
from .sample import Corpus, ImageLine, Sample, Split, Transcript
from .vocabulary import Vocabulary, build_vocabulary

log = logging.getLogger(__name__)
datalog = logging.getLogger(DATALOGGER_NAME)

PGM_SUFFIX = ".pgm"


def _listing(ids: list[str], limit: int = 10) -> str:
    shown = ", ".join(ids[:limit])
    return shown if len(ids) <= limit else f"{shown} (and {len(ids) - limit} more)"


def read_split_file(path: Path | str) -> list[str]:
    """Return the ids listed in a split file, ignoring blank lines."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip()]


def _read_transcript_table(path: Path) -> dict[str, str]:
    try:
        pairs = read_transcripts(path)
    except (OSError, ValueError) as err:
        raise CorpusError(f"cannot read transcripts: {err}") from err
    table: dict[str, str] = {}
    duplicates = []
    for sample_id, text in pairs:
        if sample_id in table:
            duplicates.append(sample_id)
        table[sample_id] = text
    if duplicates:
        raise CorpusError(f"{path}: duplicate ids {_listing(sorted(set(duplicates)))}")
    return table


def _assign_splits(split_files: Mapping[Split | str, Path | str]) -> dict[Split, list[str]]:
    assigned: dict[Split, list[str]] = {}
    owner: dict[str, Split] = {}
    duplicates = []
    for name, path in split_files.items():
        split = Split(name)
        try:
            ids = read_split_file(path)
        except OSError as err:
            raise CorpusError(f"cannot read split file {path}: {err}") from err
        for sample_id in ids:
            if sample_id in owner:
                duplicates.append(sample_id)
            owner[sample_id] = split
        assigned[split] = ids
    if duplicates:
        raise CorpusError(f"ids listed more than once in the splits: {_listing(sorted(set(duplicates)))}")
    return assigned


def load_corpus(
    image_dir: Path | str,
    transcript_file: Path | str,
    split_files: Mapping[Split | str, Path | str],
    config: CorpusConfig | None = None,
    vocabulary: Vocabulary | None = None,
    max_workers: int = 1,
) -> Corpus:
    """Pair images with transcripts and assign them to splits.

    Images are preprocessed with up to ``max_workers`` threads; the result
    does not depend on the worker count.

    :raises CorpusError: For duplicate ids, ids without a transcript or an
        image, transcripts longer than ``config.max_transcript_len`` and
        unreadable images.
    """
    config = config or CorpusConfig()
    image_dir = Path(image_dir)
    transcripts = _read_transcript_table(Path(transcript_file))
    assigned = _assign_splits(split_files)
    wanted = sorted(sample_id for ids in assigned.values() for sample_id in ids)

    no_text = [i for i in wanted if i not in transcripts]
    if no_text:
        raise CorpusError(f"ids without a transcript: {_listing(no_text)}")
    missing = [i for i in wanted if not (image_dir / f"{i}{PGM_SUFFIX}").is_file()]
    if missing:
        raise CorpusError(f"missing images in {image_dir}: {_listing(missing)}")
    too_long = [i for i in wanted if len(transcripts[i]) > config.max_transcript_len]
    if too_long:
        raise CorpusError(
            f"transcripts longer than {config.max_transcript_len} characters: {_listing(too_long)}"
        )

    vocab = vocabulary or build_vocabulary([transcripts[i] for i in wanted])

    def load_image(sample_id: str) -> ImageLine:
        raw, maxval = read_pgm(image_dir / f"{sample_id}{PGM_SUFFIX}")
        return preprocess_image(raw, maxval, sample_id, config.image_height)

    try:
        images = map_ordered(load_image, wanted, max_workers)
    except TaskFailedError as err:
        raise CorpusError(f"image {err.item}: {err.original_exception}") from err
    by_id = dict(zip(wanted, images, strict=True))

    splits: dict[Split, list[Sample]] = {}
    for split, ids in assigned.items():
        splits[split] = [
            Sample(by_id[i], Transcript(i, transcripts[i], tuple(vocab.encode(transcripts[i]))))
            for i in ids
        ]
    corpus = Corpus.from_mapping(splits)

    counts = corpus.counts()
    datalog.info("Loaded corpus: %s", ", ".join(f"{k}={v}" for k, v in counts.items()))
    blanks = sum(sample.image.blank for split in corpus for sample in corpus[split])
    if blanks:
        datalog.warning("%d images are blank", blanks)
    if config.expected_split_sizes:
        for name, expected in config.expected_split_sizes.items():
            found = counts.get(name, 0)
            if found != expected:
                datalog.warning("Split %s has %d samples, expected %d", name, found, expected)
    return corpus


def corpus_split_files(directory: Path | str) -> dict[Split, Path]:
    """Return the split files present under ``directory/splits``."""
    splits_dir = Path(directory) / CORPUS_SPLITS_DIR
    return {
        split: splits_dir / f"{split}.txt"
        for split in Split
        if (splits_dir / f"{split}.txt").is_file()
    }


def load_corpus_dir(
    directory: Path | str,
    config: CorpusConfig | None = None,
    vocabulary: Vocabulary | None = None,
    max_workers: int = 1,
) -> Corpus:
    """Load a corpus written in the standard directory layout."""
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusError(f"corpus directory {directory} does not exist")
    split_files = corpus_split_files(directory)
    if not split_files:
        raise CorpusError(f"{directory}: no split files in {CORPUS_SPLITS_DIR}/")
    log.debug("Loading corpus from %s (splits %s)", directory, ", ".join(split_files))
    return load_corpus(
        directory / CORPUS_IMAGES_DIR,
        directory / CORPUS_TRANSCRIPTS_FILE,
        split_files,
        config,
        vocabulary,
        max_workers,
    )


def write_corpus(corpus: Corpus, directory: Path | str) -> Path:
    """Write ``corpus`` in the layout :func:`load_corpus_dir` reads.

    Images are stored without their right padding.
    """
    directory = Path(directory)
    pairs = []
    for split in corpus:
        samples = corpus[split]
        for sample in samples:
            image = sample.image
            write_pgm(
                directory / CORPUS_IMAGES_DIR / f"{sample.id}{PGM_SUFFIX}",
                image.pixels[:, : image.source_width],
            )
            pairs.append((sample.id, sample.text))
        split_path = directory / CORPUS_SPLITS_DIR / f"{split}.txt"
        split_path.parent.mkdir(parents=True, exist_ok=True)
        split_path.write_text("".join(f"{s.id}\n" for s in samples), encoding="utf-8")
    write_transcripts(directory / CORPUS_TRANSCRIPTS_FILE, sorted(pairs))
    datalog.info("Wrote %d samples to %s", len(pairs), directory)
    return directory
