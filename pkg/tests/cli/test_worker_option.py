import os

import pytest

from scrawl.cli.cmd_cli import cli
from scrawl.cli.context import ScrawlContext


@pytest.mark.parametrize(
    "value, expected",
    [
        ("1", 1),
        ("7", 7),
        ("all", os.cpu_count() or 1),
        ("half", max(1, (os.cpu_count() or 1) // 2)),
    ],
)
def test_workers_option(runner, value, expected):
    context = ScrawlContext()
    result = runner.invoke(cli, ["-j", value, "config", "dump"], obj=context)

    assert result.exit_code == 0, result.output
    assert context.config.max_workers == expected
    assert f"max_workers = {expected}" in result.output


def test_workers_option_invalid_value(runner):
    result = runner.invoke(cli, ["-j", "not-a-number", "config", "list"])

    # A config error, not a click usage error, but the same exit status
    assert result.exit_code == 2
    assert "Invalid max_workers value" in result.output
