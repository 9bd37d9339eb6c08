from scrawl.cli.cmd_cli import cli
from scrawl.cli.context import ScrawlContext


def test_verbosity_counts(runner):
    context = ScrawlContext()
    result = runner.invoke(cli, ["-vvv", "config", "dump"], obj=context)

    assert result.exit_code == 0
    assert context.verbose == 3
