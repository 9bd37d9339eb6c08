"""Tests for the configuration error formatters."""

import io
import tomllib
from typing import Any

from pydantic import BaseModel, ValidationError, create_model
import pytest
from rich.console import Console

from scrawl.constants import DEFAULT_ERROR_LIMIT
from scrawl.models.config import RunConfig
from scrawl.utils.errors import format_pydantic_error, format_toml_error


def _console() -> tuple[Console, io.StringIO]:
    buf = io.StringIO()
    return Console(file=buf, width=200, force_terminal=False), buf


def _validation_error(model: type[BaseModel], data: dict[str, Any]) -> ValidationError:
    with pytest.raises(ValidationError) as excinfo:
        model.model_validate(data)
    return excinfo.value


def test_nested_field_title():
    err = _validation_error(RunConfig, {"decoder": {"hidden_size": 0}})
    console, buf = _console()

    format_pydantic_error(err, RunConfig, "scrawl.toml", console=console)

    out = buf.getvalue()
    assert "1 Validation error in config file 'scrawl.toml':" in out
    assert "In 'decoder.hidden_size':" in out
    assert "Expected: GRU hidden units (Hd)" in out


def test_description_needs_verbose():
    err = _validation_error(RunConfig, {"max_workers": "many"})

    console, buf = _console()
    format_pydantic_error(err, RunConfig, "scrawl.toml", verbose=0, console=console)
    assert "Description:" not in buf.getvalue()
    assert "Invalid max_workers value" in buf.getvalue()

    console, buf = _console()
    format_pydantic_error(err, RunConfig, "scrawl.toml", verbose=1, console=console)
    assert "Description: Max concurrent workers" in buf.getvalue()


def test_model_validator_error_has_root_location():
    err = _validation_error(RunConfig, {"cnn": {"pool_after": [1, 2, 3, 4], "bn_after": [4, 5, 6, 7]}})
    console, buf = _console()

    format_pydantic_error(err, RunConfig, "scrawl.toml", console=console)

    out = buf.getvalue()
    assert "In 'cnn':" in out
    assert "both pool and normalize" in out


def _too_many_errors() -> tuple[type[BaseModel], ValidationError]:
    fields: dict[str, Any] = {f"f{i}": (int, ...) for i in range(DEFAULT_ERROR_LIMIT + 1)}
    model = create_model("ManyFields", __base__=BaseModel, **fields)
    return model, _validation_error(model, {name: "x" for name in fields})


def test_truncated_without_vv():
    model, err = _too_many_errors()
    console, buf = _console()

    format_pydantic_error(err, model, "scrawl.toml", verbose=1, console=console)

    out = buf.getvalue()
    assert f"{DEFAULT_ERROR_LIMIT + 1} Validation errors" in out
    assert "... and 1 more errors" in out
    assert f"In 'f{DEFAULT_ERROR_LIMIT}'" not in out


def test_vv_shows_everything():
    model, err = _too_many_errors()
    console, buf = _console()

    format_pydantic_error(err, model, "scrawl.toml", verbose=2, console=console)

    out = buf.getvalue()
    assert f"In 'f{DEFAULT_ERROR_LIMIT}'" in out
    assert "more errors" not in out


def test_default_console_is_stderr(capsys):
    err = _validation_error(RunConfig, {"seed": -1})

    format_pydantic_error(err, RunConfig, "run.toml")

    captured = capsys.readouterr()
    assert "In 'seed':" in captured.err
    assert captured.out == ""


def test_format_toml_error(capsys):
    with pytest.raises(tomllib.TOMLDecodeError) as excinfo:
        tomllib.loads("input_feeding = True")

    format_toml_error(excinfo.value, "scrawl.toml")

    captured = capsys.readouterr()
    assert "Syntax error in config file 'scrawl.toml'" in captured.err
    assert "valid TOML file" in captured.err
