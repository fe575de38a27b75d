"""Training protocol: epoch loop, mini-batches, periodic checkpoints,
best-validation selection, and multi-run statistics.

Every source of randomness (init, shuffling, dropout) is an independent
stream derived from the run seed by a fixed offset, so a run is bit-for-bit
reproducible and the streams never collide across the seeds of one
``run_many`` sweep.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .adam import AdamState, adam_step
from .errors import ConfigError, NumericError
from .mlp import DEFAULT_HIDDEN_DIMS, MlpModel, backward, bce_loss, forward, init_model
from .records import FeatureVector, stack_features

_INIT_OFFSET = 1 << 24
_SHUFFLE_OFFSET = 2 << 24
_DROPOUT_OFFSET = 3 << 24


@dataclass
class TrainConfig:
    """The training protocol's constants, all overridable."""

    lr: float = 7e-4
    batch_size: int = 128
    epochs: int = 100
    checkpoint_every: int = 10
    threshold: float = 0.5
    dropout_p: float = 0.2
    seed: int = 0
    runs: int = 10
    hidden_dims: tuple[int, ...] = DEFAULT_HIDDEN_DIMS

    def validate(self) -> None:
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.checkpoint_every < 1 or self.epochs % self.checkpoint_every != 0:
            raise ConfigError(
                f"checkpoint_every ({self.checkpoint_every}) must divide epochs ({self.epochs})"
            )
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold must lie in (0, 1), got {self.threshold}")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ConfigError(f"dropout_p must lie in [0, 1), got {self.dropout_p}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")

    def to_dict(self) -> dict:
        return {
            "lr": self.lr,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "checkpoint_every": self.checkpoint_every,
            "threshold": self.threshold,
            "dropout_p": self.dropout_p,
            "seed": self.seed,
            "runs": self.runs,
            "hidden_dims": list(self.hidden_dims),
        }


@dataclass
class CheckpointRecord:
    epoch: int
    validation_accuracy: float


@dataclass
class TrainRunResult:
    """Artifacts of one training run. ``model`` is the selected snapshot."""

    seed: int
    train_loss: list[float]
    train_accuracy: list[float]
    checkpoints: list[CheckpointRecord]
    selected_epoch: int
    model: MlpModel
    # batch-level trace of the first epoch, kept for convergence diagnostics
    first_epoch_batch_loss: list[float] | None = None

    @property
    def selected_validation_accuracy(self) -> float:
        for record in self.checkpoints:
            if record.epoch == self.selected_epoch:
                return record.validation_accuracy
        raise ConfigError(f"selected epoch {self.selected_epoch} has no checkpoint record")

    def summary_dict(self) -> dict:
        return {
            "seed": self.seed,
            "train_loss": self.train_loss,
            "train_accuracy": self.train_accuracy,
            "checkpoints": [
                {"epoch": c.epoch, "validation_accuracy": c.validation_accuracy}
                for c in self.checkpoints
            ],
            "selected_epoch": self.selected_epoch,
            "selected_validation_accuracy": self.selected_validation_accuracy,
        }


@dataclass
class RunManyResult:
    results: list[TrainRunResult]
    evaluation_accuracies: list[float]
    mean: float
    std: float

    def formatted(self) -> str:
        """Percent-scale "mean +- std" line, e.g. '98.02 +- 0.18'."""
        return f"{100.0 * self.mean:.2f} +- {100.0 * self.std:.2f}"


CheckpointSink = Callable[[int, int, MlpModel], None]
LogFn = Callable[[str], None]


def train_one_run(
    train: Sequence[FeatureVector],
    validation: Sequence[FeatureVector],
    config: TrainConfig,
    checkpoint_sink: CheckpointSink | None = None,
    log: LogFn | None = None,
) -> TrainRunResult:
    """Run the full protocol once with ``config.seed`` as the run seed.

    Per epoch: seeded shuffle, batches of ``batch_size`` (final partial
    batch kept), forward/backward/adam per batch. Every
    ``checkpoint_every`` epochs the model is snapshotted and scored on the
    validation set in eval mode; the snapshot with the highest validation
    accuracy wins, earliest epoch on ties.
    """
    config.validate()
    if not train:
        raise ConfigError("training subset is empty")
    if not validation:
        raise ConfigError("validation subset is empty")

    X_train, y_train = stack_features(list(train))
    X_val, y_val = stack_features(list(validation))
    n = X_train.shape[0]

    model = init_model(
        dim=X_train.shape[1],
        dropout_p=config.dropout_p,
        seed=config.seed + _INIT_OFFSET,
        hidden_dims=config.hidden_dims,
    )
    state = AdamState.for_model(model, lr=config.lr)
    shuffle_rng = np.random.Generator(np.random.PCG64(config.seed + _SHUFFLE_OFFSET))
    dropout_rng = np.random.Generator(np.random.PCG64(config.seed + _DROPOUT_OFFSET))

    train_loss: list[float] = []
    train_accuracy: list[float] = []
    first_epoch_batch_loss: list[float] = []
    checkpoints: list[CheckpointRecord] = []
    best: tuple[float, int, MlpModel] | None = None  # (acc, epoch, snapshot)

    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        for start in range(0, n, config.batch_size):
            batch_idx = order[start : start + config.batch_size]
            xb, yb = X_train[batch_idx], y_train[batch_idx]
            dropout_seed = int(dropout_rng.integers(0, 2**63))
            y_hat, cache = forward(model, xb, mode="train", dropout_seed=dropout_seed)
            loss = bce_loss(yb, y_hat)
            if not math.isfinite(loss):
                raise NumericError(
                    f"non-finite loss at epoch {epoch}, batch {start // config.batch_size}"
                )
            grads = backward(model, cache, yb)
            adam_step(model, state, grads)
            loss_sum += loss * len(batch_idx)
            correct += int(np.sum((y_hat >= config.threshold) == (yb == 1.0)))
            if epoch == 1:
                first_epoch_batch_loss.append(loss)
        train_loss.append(loss_sum / n)
        train_accuracy.append(correct / n)

        if epoch % config.checkpoint_every == 0:
            val_acc = _accuracy(model, X_val, y_val, config.threshold)
            checkpoints.append(CheckpointRecord(epoch=epoch, validation_accuracy=val_acc))
            snapshot = model.copy()
            if checkpoint_sink is not None:
                checkpoint_sink(config.seed, epoch, snapshot)
            if best is None or val_acc > best[0]:
                best = (val_acc, epoch, snapshot)

        if log is not None:
            log(
                f"run {config.seed} epoch {epoch}/{config.epochs} "
                f"loss {train_loss[-1]:.4f} acc {train_accuracy[-1]:.4f}"
            )

    assert best is not None  # checkpoint_every divides epochs, so >= 1 checkpoint
    return TrainRunResult(
        seed=config.seed,
        train_loss=train_loss,
        train_accuracy=train_accuracy,
        checkpoints=checkpoints,
        selected_epoch=best[1],
        model=best[2],
        first_epoch_batch_loss=first_epoch_batch_loss,
    )


def run_many(
    train: Sequence[FeatureVector],
    validation: Sequence[FeatureVector],
    evaluation: Sequence[FeatureVector],
    config: TrainConfig,
    jobs: int = 1,
    checkpoint_sink: CheckpointSink | None = None,
    log: LogFn | None = None,
) -> RunManyResult:
    """Train ``config.runs`` times with seeds seed+0 .. seed+runs-1 and
    report the mean and sample standard deviation of evaluation accuracy.

    Runs share only read-only data, so ``jobs > 1`` executes them in a
    thread pool with byte-identical results to sequential execution.
    """
    config.validate()
    if not evaluation:
        raise ConfigError("evaluation subset is empty")
    X_eval, y_eval = stack_features(list(evaluation))

    def one(run_index: int) -> TrainRunResult:
        run_config = replace(config, seed=config.seed + run_index)
        return train_one_run(
            train, validation, run_config, checkpoint_sink=checkpoint_sink, log=log
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, range(config.runs)))
    else:
        results = [one(i) for i in range(config.runs)]

    accuracies = [
        _accuracy(r.model, X_eval, y_eval, config.threshold) for r in results
    ]
    mean = float(np.mean(accuracies))
    # sample std; a single run has no spread to estimate, reported as 0
    std = float(np.std(accuracies, ddof=1)) if len(accuracies) > 1 else 0.0
    return RunManyResult(
        results=results, evaluation_accuracies=accuracies, mean=mean, std=std
    )


def _accuracy(model: MlpModel, X: np.ndarray, y: np.ndarray, threshold: float) -> float:
    y_hat, _ = forward(model, X, mode="eval")
    return float(np.mean((y_hat >= threshold) == (y == 1.0)))
