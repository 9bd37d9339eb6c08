"""About module for the scrawl package.

This module contains metadata about the package, including its version and authors.
"""

__version__ = "0.4.0"
__authors__ = [
    "Tom Schraitle <toms@suse.de>",
]
