"""Constants for the CLI application."""

from pathlib import Path

import platformdirs

APP_NAME: str = "scrawl"
"""The name of the application, used in paths and config files."""

TRAINLOGGER_NAME = f"{APP_NAME}.train"
"""The logger that reports per-epoch training progress."""

DATALOGGER_NAME = f"{APP_NAME}.data"
"""The logger that reports corpus ingestion."""

# --- Special tokens of the output alphabet
PAD_ID: int = 0
SOS_ID: int = 1
EOS_ID: int = 2
UNK_ID: int = 3
SPECIAL_TOKENS: tuple[str, ...] = ("<pad>", "<sos>", "<eos>", "<unk>")
"""Names of the special tokens, indexed by their id."""

PRINTABLE_CHARS: str = "".join(chr(code) for code in range(0x20, 0x7F))
"""The 95 printable ASCII characters that make up the character alphabet."""

# --- Image geometry
IMAGE_HEIGHT: int = 64
"""Height of every preprocessed text-line image in pixels."""

GRID_STRIDE: int = 16
"""Pixels per feature-grid cell along both axes (four 2x2 poolings)."""

# --- Training defaults
WIDTH_CLASSES: tuple[int, ...] = (160, 320, 480, 640, 800, 960)
"""Default bucket width classes in pixels."""

LENGTH_CLASSES: tuple[int, ...] = (16, 32, 48, 64, 96, 128)
"""Default bucket target-length classes (tokens including EOS)."""

DEFAULT_MAX_DECODE_LEN: int = 128
"""Upper bound on emitted tokens during greedy decoding."""

IAM_SPLIT_SIZES: dict[str, int] = {"train": 6161, "validation": 966, "test": 2915}
"""Line counts of the reference handwriting benchmark splits."""

# --- Files and directories
CORPUS_IMAGES_DIR = "images"
CORPUS_TRANSCRIPTS_FILE = "transcripts.tsv"
CORPUS_SPLITS_DIR = "splits"

METRICS_CSV = "metrics.csv"
METRICS_CSV_HEADER: tuple[str, ...] = ("epoch", "train_loss", "val_cer")
"""Header of the per-epoch metrics file written by ``scrawl train``."""

EVAL_CSV_HEADER: tuple[str, ...] = ("id", "ref", "hyp", "distance")
"""Header of the per-sample file written by ``scrawl evaluate``."""

EVAL_CSV = "eval-{split}.csv"
"""Per-sample result file of ``scrawl evaluate``, one per split."""

COMPARE_CSV = "compare.csv"
COMPARE_CSV_HEADER: tuple[str, ...] = ("attention", "epochs", "test_cer", "linearity")
"""Header of the summary file written by ``scrawl compare``."""

CHECKPOINT_DIR = "checkpoints"
BEST_CHECKPOINT = "best.ck"

# --- Configuration
CONFIG_BASENAMES: tuple[str, ...] = ("scrawl.toml", ".scrawl.toml")
"""Basenames searched for in the configuration directories."""

PROJECT_DIR = Path.cwd()
"""The current working directory, used as the project directory."""

USER_CONFIG_DIR = platformdirs.user_config_path(APP_NAME)
"""The user's configuration directory."""

CONFIG_PATHS: tuple[Path, ...] = (USER_CONFIG_DIR, PROJECT_DIR)
"""Directories searched for configuration files, lowest priority first."""

DEFAULT_LOG_DIR = platformdirs.user_state_path(APP_NAME) / "log"
"""Default directory of the timestamped debug log files."""

DEFAULT_ERROR_LIMIT = 5
"""Maximum number of validation errors displayed without ``-vv``."""

# --- Exit codes
EXIT_RUNTIME_ERROR = 1
"""Training aborted, or a checkpoint does not fit the model."""

EXIT_USAGE_ERROR = 2
"""Invalid configuration, missing or unreadable input."""
