import json
from pathlib import Path

from click.testing import CliRunner

from scrawl.cli.cmd_cli import cli


def test_list_as_json(runner: CliRunner, config_file: Path):
    result = runner.invoke(cli, ["--config", str(config_file), "config", "list"])
    assert result.exit_code == 0, result.output
    body = result.output[result.output.index("{") :]
    data = json.loads(body)
    assert data["cnn"]["channels"] == [2, 2, 2, 2, 2, 2, 3]
    assert data["attention"] == "softmax"
    assert "logging" in data


def test_list_flat(runner: CliRunner, config_file: Path):
    result = runner.invoke(cli, ["--config", str(config_file), "--seed", "12", "config", "list", "--flat"])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert "seed = 12" in lines
    assert "decoder.hidden_size = 5" in lines
    assert "attention = 'softmax'" in lines


def test_list_model_only(runner: CliRunner, config_file: Path):
    result = runner.invoke(cli, ["--config", str(config_file), "config", "list", "--flat", "--model"])
    assert result.exit_code == 0
    keys = {line.split(" = ")[0] for line in result.output.splitlines()}
    assert "encoder.hidden_size" in keys
    assert not any(key.startswith(("paths.", "logging.")) for key in keys)
    assert "max_workers" not in keys
