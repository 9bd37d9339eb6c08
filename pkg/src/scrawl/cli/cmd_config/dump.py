"""CLI interface to write the canonical configuration text."""

from pathlib import Path

import click

from ..context import ScrawlContext


@click.command(name="dump")
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write to this file instead of stdout.",
)
@click.pass_context
def dump_config(ctx: click.Context, output: Path | None) -> None:
    """Print the canonical key-sorted text; it loads back with ``--config``."""
    context: ScrawlContext = ctx.obj
    text = context.config.canonical_text()
    if output is None:
        click.echo(text, nl=False)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")
    click.echo(f"Wrote {output}")
