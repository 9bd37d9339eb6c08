"""Score a checkpoint on one split of a corpus."""

from pathlib import Path

import click
from rich.console import Console
from rich.markup import escape

from ..constants import EVAL_CSV, EXIT_RUNTIME_ERROR, EXIT_USAGE_ERROR
from ..corpus import CorpusError, Split, load_corpus_dir
from ..tasks.evaluate import evaluate_split, write_eval_csv
from ..tasks.inference import load_transcriber
from ..training import CheckpointError
from .context import ScrawlContext

console = Console()
console_err = Console(stderr=True)


@click.command(help=__doc__)
@click.option(
    "--checkpoint",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Checkpoint file to evaluate.",
)
@click.option(
    "--corpus",
    "corpus_dir",
    required=True,
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Corpus directory with images/, transcripts.tsv and splits/.",
)
@click.option(
    "--split",
    type=click.Choice([s.value for s in Split]),
    default=Split.TEST.value,
    help="Split to score.",
)
@click.pass_context
def evaluate(ctx: click.Context, checkpoint: Path, corpus_dir: Path, split: str) -> None:
    """Print the pooled CER and append per-sample rows to ``eval-<split>.csv``."""
    context: ScrawlContext = ctx.obj
    try:
        model = load_transcriber(checkpoint, context.model_config(), context.config)
    except CheckpointError as err:
        console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
        ctx.exit(EXIT_RUNTIME_ERROR)

    config = model.config
    try:
        corpus = load_corpus_dir(corpus_dir, config.corpus, model.vocabulary, config.max_workers)
    except CorpusError as err:
        console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
        ctx.exit(EXIT_USAGE_ERROR)

    samples = corpus[split]
    if not samples:
        console_err.print(f"[red]ERROR:[/] the {split} split of {corpus_dir} is empty")
        ctx.exit(EXIT_USAGE_ERROR)

    try:
        report = evaluate_split(model, samples, config.training.batch_size, config.max_workers)
    except ValueError as err:
        console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
        ctx.exit(EXIT_USAGE_ERROR)

    csv_path = write_eval_csv(report, config.paths.out_dir / EVAL_CSV.format(split=split))
    console.print(f"CER {report.cer:.2%} on {len(report)} {split} lines")
    console.print(f"Per-sample results in {csv_path}")
