"""Train the softmax, sigmoid and none mechanisms identically and compare them."""

from pathlib import Path

import click
from rich.console import Console
from rich.markup import escape

from ..constants import COMPARE_CSV, EXIT_RUNTIME_ERROR, EXIT_USAGE_ERROR
from ..corpus import CorpusError, Split, load_corpus_dir
from ..models.attention import AttentionMechanism
from ..tasks.compare import compare_mechanisms, results_table
from ..training import EpochMetrics, TrainingAbortedError
from .context import ScrawlContext

console = Console()
console_err = Console(stderr=True)


def _print_epoch(mechanism: AttentionMechanism, metrics: EpochMetrics) -> None:
    val = "-" if metrics.val_cer is None else f"{metrics.val_cer:.2%}"
    console.print(
        f"[cyan]{mechanism:>7}[/] epoch {metrics.epoch:>4}  loss {metrics.train_loss:.4f}  val CER {val}"
    )


@click.command(help=__doc__)
@click.option(
    "--corpus",
    "corpus_dir",
    required=True,
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Corpus directory; the test split is scored.",
)
@click.option("--epochs", type=click.IntRange(min=0), help="Epochs per mechanism instead of training.epochs.")
@click.option(
    "--extra-epochs-none",
    type=click.IntRange(min=0),
    default=0,
    help="Additional epochs for the mechanism without normalization.",
)
@click.pass_context
def compare(ctx: click.Context, corpus_dir: Path, epochs: int | None, extra_epochs_none: int) -> None:
    """Print test CER and mean alignment linearity per mechanism."""
    context: ScrawlContext = ctx.obj
    config = context.config
    try:
        corpus = load_corpus_dir(corpus_dir, config.corpus, max_workers=config.max_workers)
    except CorpusError as err:
        console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
        ctx.exit(EXIT_USAGE_ERROR)
    for split in (Split.TRAIN, Split.TEST):
        if not corpus[split]:
            console_err.print(f"[red]ERROR:[/] the {split} split is empty")
            ctx.exit(EXIT_USAGE_ERROR)

    out_dir = config.paths.out_dir
    try:
        results = compare_mechanisms(
            config, corpus, epochs, extra_epochs_none, out_dir, on_epoch=_print_epoch
        )
    except TrainingAbortedError as err:
        console_err.print(f"[red]Training aborted:[/] {escape(str(err))}")
        ctx.exit(EXIT_RUNTIME_ERROR)
    except ValueError as err:
        console_err.print(f"[red]Training failed:[/] {escape(str(err))}")
        ctx.exit(EXIT_RUNTIME_ERROR)

    console.print(results_table(results))
    console.print(f"Summary appended to {out_dir / COMPARE_CSV}", markup=False)
