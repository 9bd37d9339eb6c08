"""Render configuration errors for the terminal."""

import tomllib

from pydantic import BaseModel, ValidationError
from pydantic.fields import FieldInfo
from rich.console import Console
from rich.text import Text

from ..constants import DEFAULT_ERROR_LIMIT


def _field_info(model_class: type[BaseModel], loc: tuple) -> FieldInfo | None:
    """Walk ``loc`` through nested models and return the final field."""
    current: type | None = model_class
    info: FieldInfo | None = None
    for part in loc:
        if not (
            isinstance(current, type)
            and issubclass(current, BaseModel)
            and part in current.model_fields
        ):
            return None
        info = current.model_fields[part]
        annotation = info.annotation
        current = annotation if isinstance(annotation, type) else None
    return info


def format_pydantic_error(
    error: ValidationError,
    model_class: type[BaseModel],
    config_file: str,
    verbose: int = 0,
    console: Console | None = None,
) -> None:
    """Print a pydantic ValidationError as a readable list.

    :param error: The caught ValidationError object.
    :param model_class: The Pydantic model class that failed validation.
    :param config_file: The name/path of the config file being processed.
    :param verbose: Verbosity level; ``-vv`` shows all errors and descriptions.
    :param console: Optional Rich console object. If None, creates a stderr console.
    """
    con = console or Console(stderr=True)
    errors = error.errors()
    count = len(errors)

    con.print(
        Text.assemble(
            (f"{count} Validation error{'s' if count > 1 else ''} ", "bold red"),
            ("in config file ", "white"),
            (f"'{config_file}'", "bold cyan"),
            (":", "white"),
        )
    )
    con.print()

    shown = errors if verbose >= 2 else errors[:DEFAULT_ERROR_LIMIT]
    for i, err in enumerate(shown, 1):
        loc_path = ".".join(str(part) for part in err["loc"]) or "<root>"
        panel = Text()
        panel.append(f"({i}) In '", style="white")
        panel.append(loc_path, style="bold yellow")
        panel.append("':\n", style="white")
        panel.append(f"    {err['msg']}\n", style="red")

        info = _field_info(model_class, err["loc"])
        if info is not None:
            if info.title:
                panel.append("    Expected: ", style="dim")
                panel.append(f"{info.title}\n", style="italic green")
            if verbose > 0 and info.description:
                panel.append("    Description: ", style="dim")
                panel.append(f"{info.description}\n", style="dim italic")

        con.print(panel)

    if count > len(shown):
        con.print(
            f"[dim]... and {count - len(shown)} more errors. "
            "Use '-vv' to see all errors.[/dim]\n"
        )


def format_toml_error(
    error: tomllib.TOMLDecodeError,
    config_file: str,
    console: Console | None = None,
) -> None:
    """Print a TOML syntax error.

    :param error: The caught TOMLDecodeError object.
    :param config_file: The name/path of the config file with the syntax error.
    :param console: Optional Rich console object.
    """
    con = console or Console(stderr=True)
    con.print(
        Text.assemble(
            ("Syntax error ", "bold red"),
            ("in config file ", "white"),
            (f"'{config_file}'", "bold cyan"),
            (":", "white"),
        )
    )
    con.print(f"    [red]{error}[/red]")
    con.print()
    con.print("    [dim]Please verify that the file is a valid TOML file.[/dim]")
