"""Export the attention of every decoding step for a line image."""

from pathlib import Path

import click
from rich.console import Console
from rich.markup import escape

from ..constants import EXIT_RUNTIME_ERROR, EXIT_USAGE_ERROR
from ..corpus.pgm import PgmError
from ..network.attn_decoder import TraceError
from ..tasks.inference import load_transcriber, transcribe_file
from ..training import CheckpointError
from ..visualize import alignment_linearity, write_trace_images
from .context import ScrawlContext

console = Console()
console_err = Console(stderr=True)


@click.command(help=__doc__)
@click.option(
    "--checkpoint",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Checkpoint file of the model.",
)
@click.option(
    "--out-dir",
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory for the PGM files [default: <out>/attention].",
)
@click.option("--step", type=click.IntRange(min=0), help="Write the overlay of this step only.")
@click.argument("image", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def visualize(
    ctx: click.Context, checkpoint: Path, out_dir: Path | None, step: int | None, image: Path
) -> None:
    """Write ``<stem>.attention.pgm`` and ``<stem>.step-NNN.pgm`` overlays for IMAGE."""
    context: ScrawlContext = ctx.obj
    try:
        model = load_transcriber(checkpoint, context.model_config(), context.config)
    except CheckpointError as err:
        console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
        ctx.exit(EXIT_RUNTIME_ERROR)

    try:
        line, result = transcribe_file(model, image)
    except (OSError, PgmError) as err:
        console_err.print(f"[red]ERROR:[/] cannot read {image}: {escape(str(err))}")
        ctx.exit(EXIT_USAGE_ERROR)

    target = out_dir if out_dir is not None else context.config.paths.out_dir / "attention"
    try:
        written = write_trace_images(line.pixels, result.trace, target, image.stem, step)
    except TraceError as err:
        console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
        ctx.exit(EXIT_USAGE_ERROR)

    console.print(f"Transcription: {result.text!r}", markup=False)
    console.print(
        f"{result.trace.steps} steps, alignment linearity {alignment_linearity(result.trace):.3f}"
    )
    console.print(f"Wrote {len(written)} images to {target}", markup=False)
