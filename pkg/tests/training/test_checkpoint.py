from pathlib import Path

import numpy as np
import pytest

from scrawl.corpus.sample import Corpus, Split
from scrawl.corpus.vocabulary import Vocabulary
from scrawl.models.config import RunConfig
from scrawl.training.checkpoint import (
    MAGIC,
    CheckpointError,
    encode_checkpoint,
    decode_checkpoint,
    load_checkpoint,
    save_checkpoint,
)
from scrawl.training.trainer import Trainer
from tests.common import tiny_config


@pytest.fixture
def trained(config: RunConfig, tiny_corpus: Corpus) -> Trainer:
    trainer = Trainer(config, Vocabulary.default())
    trainer.run_epoch(tiny_corpus[Split.TRAIN])
    return trainer


def test_save_load_save_is_bit_identical(trained: Trainer, tmp_path: Path):
    first = save_checkpoint(tmp_path / "a.ck", trained.checkpoint())
    loaded = load_checkpoint(first)
    second = save_checkpoint(tmp_path / "b.ck", loaded)
    assert first.read_bytes() == second.read_bytes()
    assert first.read_bytes().startswith(MAGIC)
    assert loaded.epoch == 1
    assert loaded.seed == trained.config.seed
    assert loaded.config.model_table() == trained.config.model_table()
    assert loaded.vocabulary == trained.model.vocabulary


def test_loaded_model_transcribes_identically(trained: Trainer, tiny_corpus: Corpus):
    loaded = decode_checkpoint(encode_checkpoint(trained.checkpoint()))
    lines = [s.image for s in tiny_corpus[Split.TEST]]
    before = trained.model.transcribe_lines(lines)
    after = Trainer.from_checkpoint(loaded).model.transcribe_lines(lines)
    assert [t.tokens for t in before] == [t.tokens for t in after]


def test_records_hold_tensors_statistics_and_optimizer_state(trained: Trainer):
    data = encode_checkpoint(trained.checkpoint())
    assert b"cnn.bn3.running_mean" in data
    assert b"opt/dec.out.w/sq_grad" in data
    assert b"opt/dec.out.w/sq_delta" in data
    loaded = decode_checkpoint(data)
    np.testing.assert_array_equal(
        loaded.optimizer.sq_grad["dec.out.w"], trained.optimizer.sq_grad["dec.out.w"]
    )
    np.testing.assert_array_equal(
        loaded.params.stats["cnn.bn3"].mean, trained.params.stats["cnn.bn3"].mean
    )


def test_header_is_canonical_text(trained: Trainer):
    data = encode_checkpoint(trained.checkpoint())
    size = int.from_bytes(data[12:16], "little")
    header = data[16 : 16 + size].decode("utf-8")
    lines = header.splitlines()
    assert lines == sorted(lines)
    assert "state.epoch = 1" in lines
    assert "format.version = 1" in lines
    assert not any(line.startswith(("paths.", "logging.", "max_workers")) for line in lines)


@pytest.mark.parametrize(
    "mangle, message",
    [
        (lambda d: b"NOTACKPT" + d[8:], "not a scrawl checkpoint"),
        (lambda d: d[:8] + (7).to_bytes(4, "little") + d[12:], "unsupported format version 7"),
        (lambda d: d[:-3], "truncated"),
        (lambda d: d + b"\x00", "trailing bytes"),
    ],
)
def test_corrupt_checkpoints(trained: Trainer, mangle, message: str):
    data = encode_checkpoint(trained.checkpoint())
    with pytest.raises(CheckpointError, match=message):
        decode_checkpoint(mangle(data))


def test_config_mismatch_names_the_tensor(trained: Trainer):
    data = encode_checkpoint(trained.checkpoint())
    other = tiny_config(decoder={"embedding_size": 7})
    with pytest.raises(CheckpointError, match="tensor 'dec.embedding' has shape"):
        decode_checkpoint(data, config=other)


def test_missing_file(tmp_path: Path):
    with pytest.raises(CheckpointError, match="cannot read checkpoint"):
        load_checkpoint(tmp_path / "absent.ck")
