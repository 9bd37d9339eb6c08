"""Work behind the CLI commands, free of any click handling.

* :mod:`~scrawl.tasks.inference`: load a model and transcribe single images.
* :mod:`~scrawl.tasks.evaluate`: score a corpus split.
* :mod:`~scrawl.tasks.compare`: train and compare the attention mechanisms.
"""
