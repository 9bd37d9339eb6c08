"""Context for the scrawl CLI commands."""

from dataclasses import dataclass
from pathlib import Path

from ..models.config import RunConfig


@dataclass
class ScrawlContext:
    """The CLI context shared between different subcommands."""

    verbose: int = 0
    """verbosity level"""

    configfiles: tuple[Path, ...] | None = None
    """The config files that were loaded, highest priority first"""

    config_from_defaults: bool = False
    """If set, no config file was found and only defaults were used"""

    config: RunConfig | None = None
    """The resolved run configuration"""

    model_overridden: bool = False
    """If set, ``--config``, ``--preset`` or ``--attention`` chose the architecture"""

    def model_config(self) -> RunConfig | None:
        """The architecture to check checkpoints against, or None to trust their header."""
        return self.config if self.model_overridden else None
