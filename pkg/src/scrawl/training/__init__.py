"""Teacher-forced training: loss, optimizer, batching and checkpoints."""

from .checkpoint import Checkpoint, CheckpointError, load_checkpoint, save_checkpoint
from .trainer import EpochMetrics, Trainer, TrainingAbortedError, TrainResult, train

__all__ = [
    "Checkpoint",
    "CheckpointError",
    "EpochMetrics",
    "TrainResult",
    "Trainer",
    "TrainingAbortedError",
    "load_checkpoint",
    "save_checkpoint",
    "train",
]
