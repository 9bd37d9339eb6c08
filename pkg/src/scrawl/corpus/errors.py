"""Errors raised while reading or generating a corpus."""


class CorpusError(ValueError):
    """A corpus cannot be loaded or generated as requested.

    The message names the offending sample id or file.
    """
