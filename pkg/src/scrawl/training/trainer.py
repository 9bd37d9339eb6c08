"""The teacher-forced training loop."""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
import logging
from pathlib import Path

import numpy as np

from ..constants import (
    BEST_CHECKPOINT,
    CHECKPOINT_DIR,
    METRICS_CSV,
    METRICS_CSV_HEADER,
    TRAINLOGGER_NAME,
)
from ..corpus.sample import Corpus, Sample, Split
from ..corpus.vocabulary import Vocabulary
from ..metrics import cer
from ..models.config import RunConfig
from ..network.model import Transcriber
from ..network.params import ModelParams, init_params
from ..numerics.tensor import Mode, NonFiniteError, Tape, backward
from ..utils.csvfile import append_rows
from .buckets import Batch, make_batches
from .checkpoint import Checkpoint, save_checkpoint
from .loss import xent_loss
from .optim import AdadeltaState, adadelta_update, add_l2, clip_gradients

log = logging.getLogger(__name__)
trainlog = logging.getLogger(TRAINLOGGER_NAME)


class TrainingAbortedError(RuntimeError):
    """Raised when a batch produces a non-finite loss."""


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    val_cer: float | None

    def row(self) -> tuple[int, str, str]:
        val = "" if self.val_cer is None else repr(self.val_cer)
        return (self.epoch, repr(self.train_loss), val)


@dataclass
class TrainResult:
    """The last checkpoint, the best one and the per-epoch history."""

    final: Checkpoint
    best: Checkpoint
    history: list[EpochMetrics] = field(default_factory=list)


def step_seed(seed: int, epoch: int, step: int) -> np.random.SeedSequence:
    """Seed of the dropout masks of one update."""
    return np.random.SeedSequence([seed, epoch, step])


def checkpoint_name(epoch: int) -> str:
    return f"epoch-{epoch:04d}.ck"


class Trainer:
    """Holds the model and optimizer state between updates."""

    def __init__(
        self,
        config: RunConfig,
        vocabulary: Vocabulary,
        params: ModelParams | None = None,
        optimizer: AdadeltaState | None = None,
        epoch: int = 0,
    ) -> None:
        params = params or init_params(config, len(vocabulary), config.seed)
        self.config = config
        self.model = Transcriber(config, params, vocabulary)
        self.optimizer = optimizer or AdadeltaState.zeros(
            {name: t.data for name, t in params.tensors.items()}
        )
        self.epoch = epoch

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint, local: RunConfig | None = None) -> "Trainer":
        """Resume from ``checkpoint``; ``local`` supplies workers, paths and logging."""
        return cls(
            checkpoint.config.with_machine(local) if local is not None else checkpoint.config,
            checkpoint.vocabulary,
            checkpoint.params.snapshot(),
            checkpoint.optimizer,
            checkpoint.epoch,
        )

    @property
    def params(self) -> ModelParams:
        return self.model.params

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            self.config,
            self.model.vocabulary,
            self.params.snapshot(),
            self.optimizer,
            self.epoch,
            self.config.seed,
        )

    def batch_loss(self, batch: Batch, seed: np.random.SeedSequence) -> tuple[float, dict[str, np.ndarray]]:
        """Teacher-forced loss of ``batch`` and its gradient for every parameter."""
        steps = batch.steps
        with Tape() as tape:
            distributions = self.model.forward(
                batch.images,
                batch.source_widths,
                batch.inputs[:, :steps],
                Mode.TRAIN,
                seed,
            )
            loss = xent_loss(distributions, batch.targets[:, :steps])
        grads = backward(loss, tape)
        return loss.item(), {name: grads[t] for name, t in self.params.tensors.items()}

    def train_step(self, batch: Batch, step: int) -> float:
        """Forward, backward, L2, clip and one Adadelta update.

        :raises TrainingAbortedError: If the loss is not finite.
        """
        epoch = self.epoch + 1
        where = f"epoch {epoch}, batch {step} ({', '.join(batch.ids)})"
        try:
            value, grads = self.batch_loss(batch, step_seed(self.config.seed, epoch, step))
        except NonFiniteError as err:
            raise TrainingAbortedError(f"non-finite values in {where}: {err}") from err
        if not np.isfinite(value):
            raise TrainingAbortedError(f"loss is {value} in {where}")

        opt = self.config.optimizer
        values = {name: t.data for name, t in self.params.tensors.items()}
        grads = clip_gradients(add_l2(grads, values, opt.l2), opt.clip_norm)
        updated, self.optimizer = adadelta_update(values, grads, self.optimizer, opt)
        self.model = self.model.with_params(self.params.replace(updated))
        return value

    def run_epoch(self, samples: Sequence[Sample]) -> float:
        """Train one epoch; returns the mean batch loss."""
        training = self.config.training
        epoch = self.epoch + 1
        batches = make_batches(
            samples,
            training.width_classes,
            training.length_classes,
            training.batch_size,
            seed=self.config.seed + epoch,
        )
        losses = [self.train_step(batch, step) for step, batch in enumerate(batches)]
        self.epoch = epoch
        return float(np.mean(losses))

    def validate(self, samples: Sequence[Sample]) -> float | None:
        """Greedy-decoding CER on ``samples``; None without samples."""
        if not samples:
            return None
        lines = self.model.transcribe_lines(
            [s.image for s in samples],
            self.config.training.batch_size,
            self.config.max_workers,
        )
        return cer([s.text for s in samples], [t.text for t in lines])


def train(
    config: RunConfig,
    corpus: Corpus,
    epochs: int | None = None,
    out_dir: Path | None = None,
    trainer: Trainer | None = None,
    on_epoch: Callable[[EpochMetrics], None] | None = None,
) -> TrainResult:
    """Train on the train split, validating after every epoch.

    With ``out_dir`` a checkpoint is written per epoch (and for the starting
    state of a fresh run), the best validation checkpoint is kept as
    :data:`~scrawl.constants.BEST_CHECKPOINT` and one metrics row per epoch
    is appended to :data:`~scrawl.constants.METRICS_CSV`. Without a
    validation split the latest epoch counts as the best.

    :raises ValueError: If the train split is empty.
    :raises TrainingAbortedError: If a batch produces a non-finite loss.
    """
    samples = corpus[Split.TRAIN]
    if not samples:
        raise ValueError("the train split is empty")
    trainer = trainer or Trainer(config, Vocabulary.default())
    epochs = config.training.epochs if epochs is None else epochs
    checkpoints = out_dir / CHECKPOINT_DIR if out_dir is not None else None

    best = trainer.checkpoint()
    best_cer: float | None = None
    if checkpoints is not None and trainer.epoch == 0:
        save_checkpoint(checkpoints / checkpoint_name(0), best)

    trainlog.info(
        "Training %d epochs on %d lines (%s attention, seed %d)",
        epochs,
        len(samples),
        config.attention,
        config.seed,
    )
    history: list[EpochMetrics] = []
    for _ in range(epochs):
        loss = trainer.run_epoch(samples)
        val_cer = trainer.validate(corpus[Split.VALIDATION])
        metrics = EpochMetrics(trainer.epoch, loss, val_cer)
        history.append(metrics)
        current = trainer.checkpoint()
        improved = val_cer is None or best_cer is None or val_cer < best_cer
        if improved:
            best, best_cer = current, val_cer

        if out_dir is not None and checkpoints is not None:
            save_checkpoint(checkpoints / checkpoint_name(trainer.epoch), current)
            if improved:
                save_checkpoint(checkpoints / BEST_CHECKPOINT, current)
            append_rows(out_dir / METRICS_CSV, METRICS_CSV_HEADER, [metrics.row()])

        trainlog.info(
            "epoch %d: train loss %.4f, validation CER %s",
            metrics.epoch,
            loss,
            "-" if val_cer is None else f"{val_cer:.4f}",
        )
        if on_epoch is not None:
            on_epoch(metrics)

    return TrainResult(trainer.checkpoint(), best, history)
