"""Score a model on a corpus split."""

from collections.abc import Sequence
import logging
from pathlib import Path

from ..constants import EVAL_CSV_HEADER
from ..corpus.sample import Sample
from ..metrics import EvalReport, evaluate_pairs
from ..network.model import Transcriber
from ..utils.csvfile import append_rows

log = logging.getLogger(__name__)


def evaluate_split(
    model: Transcriber,
    samples: Sequence[Sample],
    batch_size: int = 16,
    max_workers: int = 1,
) -> EvalReport:
    """Greedy-decode every sample and compare it with its transcript.

    :raises ValueError: If ``samples`` is empty or all references are empty.
    """
    if not samples:
        raise ValueError("nothing to evaluate: the split is empty")
    lines = model.transcribe_lines([s.image for s in samples], batch_size, max_workers)
    report = evaluate_pairs(
        [s.id for s in samples], [s.text for s in samples], [t.text for t in lines]
    )
    log.info("CER %.4f over %d lines", report.cer, len(report))
    return report


def write_eval_csv(report: EvalReport, path: Path | str) -> Path:
    """Append the per-sample rows of ``report`` to ``path``."""
    path = Path(path)
    append_rows(path, EVAL_CSV_HEADER, report.rows())
    return path
