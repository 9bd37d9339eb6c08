"""Transcribe a single text-line image."""

from pathlib import Path

import click
from rich.console import Console
from rich.markup import escape

from ..constants import EXIT_RUNTIME_ERROR, EXIT_USAGE_ERROR
from ..corpus.pgm import PgmError
from ..tasks.inference import load_transcriber, transcribe_file
from ..training import CheckpointError
from .context import ScrawlContext

console_err = Console(stderr=True)


@click.command(help=__doc__)
@click.option(
    "--checkpoint",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Checkpoint file of the model.",
)
@click.argument("image", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def transcribe(ctx: click.Context, checkpoint: Path, image: Path) -> None:
    """Print the transcription of IMAGE, a binary PGM file."""
    context: ScrawlContext = ctx.obj
    try:
        model = load_transcriber(checkpoint, context.model_config(), context.config)
    except CheckpointError as err:
        console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
        ctx.exit(EXIT_RUNTIME_ERROR)

    try:
        _, result = transcribe_file(model, image)
    except (OSError, PgmError) as err:
        console_err.print(f"[red]ERROR:[/] cannot read {image}: {escape(str(err))}")
        ctx.exit(EXIT_USAGE_ERROR)

    click.echo(result.text)
