"""Write a synthetic corpus of rendered text lines."""

from pathlib import Path

import click
from rich.console import Console
from rich.markup import escape

from ..constants import EXIT_USAGE_ERROR
from ..corpus import CorpusError, NoiseParams, synth_corpus, write_corpus
from ..corpus.synth import DEFAULT_CHARSET, DEFAULT_LENGTHS
from .context import ScrawlContext

console = Console()
console_err = Console(stderr=True)


@click.command(help=__doc__)
@click.argument("out_dir", type=click.Path(file_okay=False, path_type=Path))
@click.option("--train", "n_train", type=click.IntRange(min=0), default=500, help="Train lines.")
@click.option(
    "--validation", "n_validation", type=click.IntRange(min=0), default=0, help="Validation lines."
)
@click.option("--test", "n_test", type=click.IntRange(min=0), default=100, help="Test lines.")
@click.option("--charset", default=DEFAULT_CHARSET, help="Characters to draw from.")
@click.option("--min-len", type=click.IntRange(min=1), default=DEFAULT_LENGTHS[0], help="Shortest line.")
@click.option("--max-len", type=click.IntRange(min=1), default=DEFAULT_LENGTHS[1], help="Longest line.")
@click.option("--jitter", type=click.IntRange(0, 8), default=NoiseParams.jitter, help="Glyph offset in pixels.")
@click.option("--shear", type=click.FloatRange(min=0), default=NoiseParams.shear, help="Slant factor.")
@click.option("--sigma", type=click.FloatRange(min=0), default=NoiseParams.sigma, help="Pixel noise.")
@click.pass_context
def synth(
    ctx: click.Context,
    out_dir: Path,
    n_train: int,
    n_validation: int,
    n_test: int,
    charset: str,
    min_len: int,
    max_len: int,
    jitter: int,
    shear: float,
    sigma: float,
) -> None:
    """Render distinct random strings into OUT_DIR; the global ``--seed`` fixes the result."""
    context: ScrawlContext = ctx.obj
    counts = {
        name: count
        for name, count in (("train", n_train), ("validation", n_validation), ("test", n_test))
        if count
    }
    if not counts:
        console_err.print("[red]ERROR:[/] all split counts are zero")
        ctx.exit(EXIT_USAGE_ERROR)

    try:
        corpus = synth_corpus(
            context.config.seed,
            counts,
            charset,
            (min_len, max_len),
            NoiseParams(jitter, shear, sigma),
        )
    except (CorpusError, ValueError) as err:
        console_err.print(f"[red]ERROR:[/] {escape(str(err))}")
        ctx.exit(EXIT_USAGE_ERROR)

    write_corpus(corpus, out_dir)
    summary = ", ".join(f"{name} {count}" for name, count in corpus.counts().items())
    console.print(f"Wrote {summary} lines to {out_dir}", markup=False)
