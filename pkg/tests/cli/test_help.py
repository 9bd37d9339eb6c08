import pytest

from scrawl.cli.cmd_cli import cli


def test_help_option(runner):
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    assert "Usage:" in result.output
    for option in ("--config", "--seed", "--attention", "--preset", "--out", "--workers"):
        assert option in result.output


@pytest.mark.parametrize(
    "command, option",
    [
        (["train"], "--resume"),
        (["evaluate"], "--split"),
        (["transcribe"], "--checkpoint"),
        (["visualize"], "--step"),
        (["synth"], "--charset"),
        (["compare"], "--extra-epochs-none"),
        (["config", "list"], "--flat"),
        (["config", "dump"], "--output"),
    ],
)
def test_subcommand_help(runner, command, option):
    result = runner.invoke(cli, [*command, "--help"])
    assert result.exit_code == 0, result.output
    assert option in result.output
