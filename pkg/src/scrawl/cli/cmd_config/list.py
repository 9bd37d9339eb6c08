"""CLI interface to list the configuration."""

from typing import Any

import click
from rich import print_json
from rich.console import Console

from ...config.canonical import iter_leaves
from ..context import ScrawlContext

console = Console()


def print_section(title: str, data: dict[str, Any], flat: bool, color: str) -> None:
    """Print a configuration table in either flat or JSON format."""
    if flat:
        for key, value in iter_leaves(data):
            # repr keeps strings quoted
            console.print(f"[bold {color}]{key}[/bold {color}] = [green]{value!r}[/green]")
    else:
        console.print(f"# {title}", style="blue")
        print_json(data=data)


@click.command(name="list")
@click.option("--flat", is_flag=True, help="Output in flat dotted format (git-style)")
@click.option("--model", is_flag=True, help="Show only what a checkpoint records")
@click.pass_context
def list_config(ctx: click.Context, flat: bool, model: bool) -> None:
    """List the configuration as JSON or flat text."""
    context: ScrawlContext = ctx.obj
    run_config = context.config
    if model:
        data = run_config.model_table()
    else:
        data = run_config.model_dump(mode="json", exclude_none=True)
    sources = ", ".join(str(f) for f in context.configfiles or ()) or "defaults"
    print_section(f"Run configuration ({sources})", data, flat, "cyan")
