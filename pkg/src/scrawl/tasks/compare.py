"""Train every attention mechanism on one corpus and compare the results."""

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
import logging
from pathlib import Path

import numpy as np
from rich.table import Table

from ..constants import COMPARE_CSV, COMPARE_CSV_HEADER
from ..corpus.sample import Corpus, Split
from ..metrics import evaluate_pairs
from ..models.attention import AttentionMechanism
from ..models.config import RunConfig
from ..network.model import Transcriber, Transcription
from ..training.trainer import EpochMetrics, train
from ..utils.csvfile import append_rows
from ..visualize.attention import alignment_linearity

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MechanismResult:
    """Test scores of the best checkpoint of one mechanism."""

    attention: AttentionMechanism
    epochs: int
    test_cer: float
    linearity: float

    def row(self) -> tuple[str, int, str, str]:
        return (str(self.attention), self.epochs, repr(self.test_cer), repr(self.linearity))


def mean_linearity(transcriptions: Iterable[Transcription]) -> float:
    """Average alignment linearity over the decoded lines."""
    values = [alignment_linearity(t.trace) for t in transcriptions]
    return float(np.mean(values)) if values else 0.0


def compare_mechanisms(
    config: RunConfig,
    corpus: Corpus,
    epochs: int | None = None,
    extra_epochs_none: int = 0,
    out_dir: Path | None = None,
    mechanisms: Sequence[AttentionMechanism] = tuple(AttentionMechanism),
    on_epoch: Callable[[AttentionMechanism, EpochMetrics], None] | None = None,
) -> list[MechanismResult]:
    """Train one model per mechanism with identical settings and seed.

    The ``none`` mechanism trains ``extra_epochs_none`` more epochs. With
    ``out_dir`` every run writes into ``out_dir/<mechanism>`` and a summary
    row per mechanism is appended to :data:`~scrawl.constants.COMPARE_CSV`.

    :raises ValueError: If the train or test split is empty.
    """
    test = corpus[Split.TEST]
    if not test:
        raise ValueError("the test split is empty")
    base_epochs = config.training.epochs if epochs is None else epochs

    results = []
    for mechanism in mechanisms:
        run_config = config.model_copy(update={"attention": mechanism})
        run_epochs = base_epochs + (extra_epochs_none if mechanism is AttentionMechanism.NONE else 0)
        log.info("Training the %s model for %d epochs", mechanism, run_epochs)

        def report(metrics: EpochMetrics, mechanism: AttentionMechanism = mechanism) -> None:
            if on_epoch is not None:
                on_epoch(mechanism, metrics)

        run = train(
            run_config,
            corpus,
            run_epochs,
            out_dir / str(mechanism) if out_dir is not None else None,
            on_epoch=report,
        )
        best = run.best
        model = Transcriber(best.config, best.params, best.vocabulary)
        batch_size = run_config.training.batch_size
        lines = model.transcribe_lines([s.image for s in test], batch_size, run_config.max_workers)
        score = evaluate_pairs(
            [s.id for s in test], [s.text for s in test], [t.text for t in lines]
        )
        results.append(MechanismResult(mechanism, run_epochs, score.cer, mean_linearity(lines)))

    if out_dir is not None:
        append_rows(out_dir / COMPARE_CSV, COMPARE_CSV_HEADER, [r.row() for r in results])
    return results


def results_table(results: Sequence[MechanismResult]) -> Table:
    """A rich table with one row per mechanism, best CER first."""
    table = Table(title="Attention mechanisms")
    table.add_column("attention", style="cyan")
    table.add_column("epochs", justify="right")
    table.add_column("test CER", justify="right")
    table.add_column("linearity", justify="right")
    for result in sorted(results, key=lambda r: r.test_cer):
        table.add_row(
            str(result.attention),
            str(result.epochs),
            f"{result.test_cer:.4f}",
            f"{result.linearity:.3f}",
        )
    return table
