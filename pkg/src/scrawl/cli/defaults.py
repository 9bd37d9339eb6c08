"""Built-in defaults of the run configuration.

They sit beneath any config file and command-line option. Model sizes are
left out here; they come from the preset table.
"""

from ..constants import DEFAULT_LOG_DIR

DEFAULT_CONFIG = {
    "preset": "desk",
    "seed": 0,
    "attention": "softmax",
    "max_workers": "half",
    "paths": {
        "out_dir": "runs",
        "log_dir": str(DEFAULT_LOG_DIR),
    },
}
"""Default configuration for every run."""
