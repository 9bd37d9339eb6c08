"""CLI interface to view the run configuration."""

import click

from .dump import dump_config
from .list import list_config


@click.group(name="config", help="Show the resolved scrawl configuration.")
@click.pass_context
def config(ctx: click.Context) -> None:
    """Subcommand to inspect the configuration after all files and options are merged."""
    pass


config.add_command(list_config)
config.add_command(dump_config)
