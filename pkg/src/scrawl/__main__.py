"""Main entry point."""

from .cli.cmd_cli import cli

if __name__ == "__main__":
    cli()
