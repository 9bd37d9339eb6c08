import logging
from pathlib import Path

import numpy as np
import pytest

from scrawl.corpus.errors import CorpusError
from scrawl.corpus.loader import load_corpus, load_corpus_dir, read_split_file, write_corpus
from scrawl.corpus.pgm import write_pgm
from scrawl.corpus.sample import Split
from scrawl.corpus.synth import NoiseParams, synth_corpus
from scrawl.models.config import CorpusConfig
from scrawl.utils.csvfile import read_transcripts, write_transcripts

COUNTS = {"train": 5, "validation": 2, "test": 3}


@pytest.fixture
def corpus_dir(tmp_path: Path) -> Path:
    corpus = synth_corpus(11, COUNTS, noise=NoiseParams(jitter=1, shear=0.05, sigma=0.02))
    return write_corpus(corpus, tmp_path / "corpus")


def _layout(tmp_path: Path, transcripts: list[tuple[str, str]], train_ids: list[str]) -> tuple[Path, Path, dict]:
    image_dir = tmp_path / "images"
    for sample_id, _ in transcripts:
        raw = np.ones((32, 40))
        raw[8:24, 10:30] = 0.0
        write_pgm(image_dir / f"{sample_id}.pgm", raw)
    table = write_transcripts(tmp_path / "transcripts.tsv", transcripts)
    split = tmp_path / "train.txt"
    split.write_text("\n".join(train_ids) + "\n")
    return image_dir, table, {Split.TRAIN: split}


def test_round_trip_through_the_directory_layout(corpus_dir: Path):
    assert (corpus_dir / "images").is_dir()
    assert sorted(p.name for p in (corpus_dir / "splits").iterdir()) == [
        "test.txt",
        "train.txt",
        "validation.txt",
    ]
    original = synth_corpus(11, COUNTS, noise=NoiseParams(jitter=1, shear=0.05, sigma=0.02))
    loaded = load_corpus_dir(corpus_dir)
    assert loaded.counts() == COUNTS
    for split in original:
        assert [s.id for s in loaded[split]] == [s.id for s in original[split]]
        assert [s.text for s in loaded[split]] == [s.text for s in original[split]]
        for before, after in zip(original[split], loaded[split], strict=True):
            assert after.image.height == 64
            assert after.image.source_width == before.image.source_width
            assert after.transcript.token_ids == before.transcript.token_ids


def test_worker_count_does_not_change_the_result(corpus_dir: Path):
    sequential = load_corpus_dir(corpus_dir, max_workers=1)
    parallel = load_corpus_dir(corpus_dir, max_workers=3)
    for split in sequential:
        for a, b in zip(sequential[split], parallel[split], strict=True):
            assert a.id == b.id
            np.testing.assert_array_equal(a.image.pixels, b.image.pixels)


def test_samples_are_sorted_by_id(tmp_path: Path):
    pairs = [("b", "second"), ("a", "first"), ("c", "third")]
    image_dir, table, splits = _layout(tmp_path, pairs, ["c", "a", "b"])
    corpus = load_corpus(image_dir, table, splits)
    assert [s.id for s in corpus[Split.TRAIN]] == ["a", "b", "c"]
    assert corpus[Split.TRAIN][0].image.width == 80
    assert corpus[Split.TEST] == []


def test_missing_images_are_listed(tmp_path: Path):
    image_dir, table, splits = _layout(tmp_path, [("a", "x"), ("b", "y")], ["a", "b"])
    (image_dir / "b.pgm").unlink()
    with pytest.raises(CorpusError, match="missing images.*b"):
        load_corpus(image_dir, table, splits)


def test_duplicate_transcript_ids(tmp_path: Path):
    image_dir, table, splits = _layout(tmp_path, [("a", "x"), ("a", "y")], ["a"])
    with pytest.raises(CorpusError, match="duplicate ids a"):
        load_corpus(image_dir, table, splits)


def test_id_in_two_splits(tmp_path: Path):
    image_dir, table, splits = _layout(tmp_path, [("a", "x")], ["a"])
    test_split = tmp_path / "test.txt"
    test_split.write_text("a\n")
    with pytest.raises(CorpusError, match="more than once"):
        load_corpus(image_dir, table, {**splits, Split.TEST: test_split})


def test_id_without_transcript(tmp_path: Path):
    image_dir, table, splits = _layout(tmp_path, [("a", "x")], ["a", "zz"])
    with pytest.raises(CorpusError, match="without a transcript: zz"):
        load_corpus(image_dir, table, splits)


def test_overlong_transcripts(tmp_path: Path):
    image_dir, table, splits = _layout(tmp_path, [("a", "x" * 9)], ["a"])
    with pytest.raises(CorpusError, match="longer than 8"):
        load_corpus(image_dir, table, splits, CorpusConfig(max_transcript_len=8))


def test_unreadable_image(tmp_path: Path):
    image_dir, table, splits = _layout(tmp_path, [("a", "x")], ["a"])
    (image_dir / "a.pgm").write_bytes(b"not an image")
    with pytest.raises(CorpusError, match="image a: .*not a binary PGM"):
        load_corpus(image_dir, table, splits)


def test_split_size_warning(tmp_path: Path, caplog: pytest.LogCaptureFixture):
    image_dir, table, splits = _layout(tmp_path, [("a", "x")], ["a"])
    config = CorpusConfig(expected_split_sizes={"train": 6161})
    with caplog.at_level(logging.INFO):
        load_corpus(image_dir, table, splits, config)
    assert "train has 1 samples, expected 6161" in caplog.text
    assert "Loaded corpus: train=1" in caplog.text


def test_missing_directory(tmp_path: Path):
    with pytest.raises(CorpusError, match="does not exist"):
        load_corpus_dir(tmp_path / "nowhere")
    (tmp_path / "empty").mkdir()
    with pytest.raises(CorpusError, match="no split files"):
        load_corpus_dir(tmp_path / "empty")


def test_transcripts_escape_tabs_and_backslashes(tmp_path: Path):
    pairs = [("a", "tab\there"), ("b", "back\\slash"), ("c", ""), ("d", 'say "hi"')]
    path = write_transcripts(tmp_path / "t.tsv", pairs)
    assert read_transcripts(path) == pairs


def test_read_split_file_skips_blank_lines(tmp_path: Path):
    path = tmp_path / "s.txt"
    path.write_text("a\n\n  b  \n")
    assert read_split_file(path) == ["a", "b"]
