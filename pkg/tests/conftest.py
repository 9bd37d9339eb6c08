"""Pytest fixtures and global logging mock."""

from pathlib import Path
from unittest.mock import MagicMock

from click.testing import CliRunner
import pytest

from scrawl.corpus.loader import write_corpus
from scrawl.corpus.sample import Corpus
from scrawl.corpus.synth import synth_corpus
from scrawl.models.config import RunConfig

# Import the modules containing setup_logging for mocking
import scrawl.cli.cmd_cli
import scrawl.logging
from tests.common import LIGHT_NOISE, tiny_config


# Adding info to test report header
# https://docs.pytest.org/en/stable/example/simple.html#adding-info-to-test-report-header
def pytest_report_header(config: pytest.Config) -> str:
    """Add the scrawl version to the pytest report header."""
    from scrawl.__about__ import __version__

    return f"scrawl version: {__version__}"


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run long training tests"
    )


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# --- Global Fixture to Mute Logging Setup ---
@pytest.fixture(autouse=True, scope="function")
def mock_setup_logging_globally(monkeypatch: pytest.MonkeyPatch) -> MagicMock:
    """Mock out the setup_logging call.

    To prevent any initialization side-effects in tests.
    """
    mock_func = MagicMock()
    # This prevents scrawl.logging.setup_logging from ever running during tests.
    monkeypatch.setattr(scrawl.logging, "setup_logging", mock_func)
    monkeypatch.setattr(scrawl.cli.cmd_cli, "setup_logging", mock_func)
    return mock_func


@pytest.fixture(scope="function")
def runner() -> CliRunner:
    """Provide a CliRunner instance for testing."""
    return CliRunner()


@pytest.fixture
def config() -> RunConfig:
    """A tiny model configuration that trains in well under a second per epoch."""
    return tiny_config()


@pytest.fixture(scope="session")
def tiny_corpus() -> Corpus:
    """Six train, two validation and two test lines of three to five characters."""
    return synth_corpus(
        3, {"train": 6, "validation": 2, "test": 2}, lengths=(3, 5), noise=LIGHT_NOISE
    )


@pytest.fixture
def corpus_dir(tmp_path: Path, tiny_corpus: Corpus) -> Path:
    """:func:`tiny_corpus` written in the on-disk layout."""
    return write_corpus(tiny_corpus, tmp_path / "corpus")
