"""Train a model on a corpus directory."""

from pathlib import Path

import click
from rich.console import Console
from rich.markup import escape

from ..constants import EXIT_RUNTIME_ERROR, EXIT_USAGE_ERROR, METRICS_CSV
from ..corpus import CorpusError, Split, load_corpus_dir
from ..training import (
    CheckpointError,
    EpochMetrics,
    Trainer,
    TrainingAbortedError,
    load_checkpoint,
)
from ..training import train as run_training
from .context import ScrawlContext

console = Console()
console_err = Console(stderr=True)


def _print_epoch(metrics: EpochMetrics) -> None:
    val = "-" if metrics.val_cer is None else f"{metrics.val_cer:.2%}"
    console.print(
        f"epoch [bold]{metrics.epoch:>4}[/]  loss [cyan]{metrics.train_loss:.4f}[/]  val CER {val}"
    )


@click.command(help=__doc__)
@click.option(
    "--corpus",
    "corpus_dir",
    required=True,
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Corpus directory with images/, transcripts.tsv and splits/.",
)
@click.option("--epochs", type=click.IntRange(min=0), help="Epochs to run instead of training.epochs.")
@click.option(
    "--resume",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Continue from this checkpoint.",
)
@click.pass_context
def train(ctx: click.Context, corpus_dir: Path, epochs: int | None, resume: Path | None) -> None:
    """Train, writing a checkpoint and a metrics row per epoch.

    :param ctx: The Click context object.
    :param corpus_dir: The corpus directory.
    :param epochs: Number of epochs; defaults to ``training.epochs``.
    :param resume: Checkpoint whose model and optimizer state to continue from.
    """
    context: ScrawlContext = ctx.obj
    config = context.config

    trainer = None
    if resume is not None:
        try:
            ck = load_checkpoint(resume, context.model_config())
        except CheckpointError as err:
            console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
            ctx.exit(EXIT_RUNTIME_ERROR)
        trainer = Trainer.from_checkpoint(ck, config)
        config = trainer.config
        console.print(f"Resuming from {resume} after epoch {ck.epoch}")

    try:
        corpus = load_corpus_dir(corpus_dir, config.corpus, max_workers=config.max_workers)
    except CorpusError as err:
        console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
        ctx.exit(EXIT_USAGE_ERROR)
    if not corpus[Split.TRAIN]:
        console_err.print("[red]ERROR:[/] the train split is empty")
        ctx.exit(EXIT_USAGE_ERROR)

    out_dir = config.paths.out_dir
    try:
        result = run_training(config, corpus, epochs, out_dir, trainer, on_epoch=_print_epoch)
    except TrainingAbortedError as err:
        console_err.print(f"[red]Training aborted:[/] {escape(str(err))}")
        ctx.exit(EXIT_RUNTIME_ERROR)
    except ValueError as err:
        console_err.print(f"[red]Training failed:[/] {escape(str(err))}")
        ctx.exit(EXIT_RUNTIME_ERROR)

    console.print(
        f"Finished after epoch {result.final.epoch}; best checkpoint is epoch {result.best.epoch}. "
        f"Metrics in {out_dir / METRICS_CSV}"
    )
