"""Fixtures for the command tests: a config file and a trained tiny model."""

from pathlib import Path

import pytest

import scrawl.cli.cmd_cli as cli_mod
from scrawl.constants import BEST_CHECKPOINT, CHECKPOINT_DIR
from scrawl.corpus.sample import Corpus
from scrawl.training import train
from tests.common import tiny_config


@pytest.fixture(autouse=True)
def isolated_config_search(tmp_path_factory: pytest.TempPathFactory, monkeypatch: pytest.MonkeyPatch) -> None:
    """Search an empty directory instead of the user and project directories."""
    monkeypatch.setattr(cli_mod, "CONFIG_PATHS", (tmp_path_factory.mktemp("noconfig"),))


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    """The tiny configuration in canonical text form."""
    path = tmp_path / "tiny.toml"
    path.write_text(tiny_config().canonical_text(), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def trained_checkpoint(tmp_path_factory: pytest.TempPathFactory, tiny_corpus: Corpus) -> Path:
    """best.ck of one tiny epoch on :func:`tiny_corpus`."""
    out_dir = tmp_path_factory.mktemp("trained")
    train(tiny_config(), tiny_corpus, out_dir=out_dir)
    return out_dir / CHECKPOINT_DIR / BEST_CHECKPOINT
