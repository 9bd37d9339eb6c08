"""CLI interface for scrawl.

* :mod:`~scrawl.cli.cmd_cli`: Main CLI entry point and global options.
* :mod:`~scrawl.cli.cmd_train`: Train a model on a corpus directory.
* :mod:`~scrawl.cli.cmd_evaluate`: Score a checkpoint on a corpus split.
* :mod:`~scrawl.cli.cmd_transcribe`: Transcribe a single line image.
* :mod:`~scrawl.cli.cmd_visualize`: Export attention images for a line.
* :mod:`~scrawl.cli.cmd_synth`: Write a synthetic corpus.
* :mod:`~scrawl.cli.cmd_compare`: Train and compare the attention mechanisms.
* :mod:`~scrawl.cli.cmd_config`: Show the resolved configuration.

Additional modules:
* :mod:`~scrawl.cli.context`: Context shared by the subcommands.
* :mod:`~scrawl.cli.defaults`: Built-in configuration defaults.
"""
