"""Main CLI tool for training and running handwriting transcription models."""

from collections.abc import Sequence
import logging
from pathlib import Path
import sys
import tomllib
from typing import Any, cast

import click
from pydantic import ValidationError
import rich.console
from rich.traceback import install as install_traceback

from ..__about__ import __version__
from ..config.load import handle_config
from ..constants import APP_NAME, CONFIG_BASENAMES, CONFIG_PATHS, EXIT_USAGE_ERROR
from ..logging import setup_logging
from ..models.attention import AttentionMechanism
from ..models.config import RunConfig
from ..models.preset import Preset
from ..utils.errors import format_pydantic_error, format_toml_error
from .cmd_compare import compare
from .cmd_config import config
from .cmd_evaluate import evaluate
from .cmd_synth import synth
from .cmd_train import train
from .cmd_transcribe import transcribe
from .cmd_visualize import visualize
from .context import ScrawlContext
from .defaults import DEFAULT_CONFIG

PYTHON_VERSION = (
    f"{sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}"
)

log = logging.getLogger(__name__)
CONSOLE = rich.console.Console(stderr=True, highlight=False)


def _setup_console() -> None:
    """Configure the rich console."""
    install_traceback(console=CONSOLE, show_locals=False)


def handle_config_error(
    e: Exception,
    config_files: Sequence[Path] | None,
    verbose: int,
    ctx: click.Context,
) -> None:
    """Print a configuration error and exit with status 2.

    :param e: The exception raised while loading or validating.
    :param config_files: The files that were loaded, used for error context.
    :param verbose: The verbosity level; ``-vv`` shows every validation error.
    :param ctx: The Click context used to exit.
    """
    config_file = str((config_files or ["<defaults and options>"])[0])

    if isinstance(e, tomllib.TOMLDecodeError):
        format_toml_error(e, config_file, console=CONSOLE)
    elif isinstance(e, ValidationError):
        format_pydantic_error(e, RunConfig, config_file, verbose, console=CONSOLE)
    else:
        log.error("Configuration failed: %s", e)
        CONSOLE.print(f"[red]ERROR:[/] {e}")
    ctx.exit(EXIT_USAGE_ERROR)


def load_run_config(
    ctx: click.Context,
    config_file: Path | None,
    overrides: dict[str, Any],
) -> None:
    """Load, merge and validate the run configuration.

    :param ctx: The Click context object. The result is stored in ``ctx.obj.config``.
    :param config_file: The file given with ``--config``; disables the search.
    :param overrides: Top-level keys set by command-line options.
    """
    context = ctx.obj
    result = handle_config(config_file, CONFIG_PATHS, CONFIG_BASENAMES, DEFAULT_CONFIG)
    context.configfiles, raw_config, context.config_from_defaults = cast(
        tuple[tuple[Path, ...] | None, dict[str, Any], bool], result
    )

    for key, value in overrides.items():
        if key == "out_dir":
            raw_config.setdefault("paths", {})["out_dir"] = value
        else:
            raw_config[key] = value

    context.config = RunConfig.from_dict(raw_config)


@click.group(
    name=APP_NAME,
    context_settings={"show_default": True, "help_option_names": ["-h", "--help"]},
    help="Attention-based handwritten text line transcription.",
    invoke_without_command=True,
)
@click.version_option(
    __version__,
    prog_name=APP_NAME,
    message=f"%(prog)s, version %(version)s running Python {PYTHON_VERSION}",
)
@click.option("-v", "--verbose", count=True, help="Increase verbosity")
@click.option(
    "-j",
    "--workers",
    "max_workers",
    default=None,
    help="Maximum number of concurrent workers (integer, 'all', or 'half').",
)
@click.option(
    "--config",
    "config_file",
    metavar="CONFIG_FILE",
    type=click.Path(
        exists=True,
        dir_okay=False,
        readable=True,
        resolve_path=True,
        path_type=Path,
    ),
    help="Filename of a TOML run configuration. Overrides auto-search.",
)
@click.option("--seed", type=click.IntRange(min=0), help="Seed of every random choice.")
@click.option(
    "--attention",
    type=click.Choice([m.value for m in AttentionMechanism], case_sensitive=False),
    help="Attention mechanism of the decoder.",
)
@click.option(
    "--preset",
    type=click.Choice([p.value for p in Preset], case_sensitive=False),
    help="Named layer widths.",
)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory for checkpoints and result files.",
)
@click.pass_context
def cli(
    ctx: click.Context,
    verbose: int,
    max_workers: str | None,
    config_file: Path | None,
    seed: int | None,
    attention: str | None,
    preset: str | None,
    out_dir: Path | None,
) -> None:
    """Acts as a main entry point for CLI tool.

    :param ctx: The Click context object.
    :param verbose: The verbosity level.
    :param max_workers: Worker count from ``-j``.
    :param config_file: Filename of the TOML run configuration.
    :param seed: Overrides ``seed``.
    :param attention: Overrides ``attention``.
    :param preset: Overrides ``preset``.
    :param out_dir: Overrides ``paths.out_dir``.
    """
    if ctx.resilient_parsing:
        return

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        ctx.exit(0)

    _setup_console()
    if ctx.obj is None:
        ctx.ensure_object(ScrawlContext)

    context = ctx.obj
    context.verbose = verbose
    options = {
        "seed": seed,
        "attention": attention,
        "preset": preset,
        "out_dir": str(out_dir) if out_dir is not None else None,
        "max_workers": max_workers,
    }
    overrides = {key: value for key, value in options.items() if value is not None}
    context.model_overridden = any(v is not None for v in (config_file, attention, preset))

    try:
        load_run_config(ctx, config_file, overrides)
    except (ValueError, ValidationError, tomllib.TOMLDecodeError) as e:
        handle_config_error(e, context.configfiles or ((config_file,) if config_file else None), verbose, ctx)

    run_config = context.config
    setup_logging(
        cliverbosity=verbose,
        log_dir=run_config.paths.log_dir,
        user_config={"logging": run_config.logging.as_dictconfig()},
    )
    log.debug("Configuration files: %s", context.configfiles or "none (defaults)")


# Add subcommands
cli.add_command(train)
cli.add_command(evaluate)
cli.add_command(transcribe)
cli.add_command(visualize)
cli.add_command(synth)
cli.add_command(compare)
cli.add_command(config)
