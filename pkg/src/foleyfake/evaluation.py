"""Evaluation artifacts: overall accuracy, confusion matrix (counts and
percent of the evaluation set), per-class accuracy, and inference-time
benchmarking against the 4-second clip duration.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError, ValidationError
from .mlp import MlpModel, forward
from .records import EmbeddingRecord, FeatureVector, stack_features, time_average

CLIP_DURATION_SECONDS = 4.0

_CLASSES = ("nonfake", "fake")


@dataclass
class Prediction:
    """One clip's model output: decision = 1 iff likelihood >= threshold."""

    clip_id: str
    likelihood: float
    label: int
    decision: int


def predict(
    model: MlpModel,
    features: list[FeatureVector],
    threshold: float = 0.5,
) -> list[Prediction]:
    """Eval-mode per-clip predictions at the given decision threshold."""
    if not features:
        raise ValidationError("feature set is empty")
    X, _ = stack_features(features)
    if X.shape[1] != model.dim:
        raise ShapeError(f"features have dim {X.shape[1]}, model expects {model.dim}")
    y_hat, _ = forward(model, X, mode="eval")
    return [
        Prediction(
            clip_id=vector.clip_id,
            likelihood=float(likelihood),
            label=vector.label,
            decision=int(likelihood >= threshold),
        )
        for vector, likelihood in zip(features, y_hat)
    ]


@dataclass
class EvalReport:
    """Confusion cells are keyed predicted -> actual over {nonfake, fake};
    percent cells are of the whole evaluation set and sum to 100."""

    overall_accuracy: float
    confusion_counts: dict[str, dict[str, int]]
    confusion_percent: dict[str, dict[str, float]]
    per_class_accuracy: dict[str, float]
    n_examples: int
    threshold: float

    def to_dict(self) -> dict:
        return {
            "overall_accuracy": self.overall_accuracy,
            "confusion_counts": self.confusion_counts,
            "confusion_percent": self.confusion_percent,
            "per_class_accuracy": self.per_class_accuracy,
            "n_examples": self.n_examples,
            "threshold": self.threshold,
        }


@dataclass
class TimingReport:
    """Wall times for repeated single-sample inference. The timed path is
    the classifier only (time averaging + forward); embedding extraction
    is measured by the extractor and reported in its own sidecar."""

    times_seconds: list[float]
    mean_seconds: float
    percent_of_realtime: float
    runs: int
    clip_duration_seconds: float
    scope: str = "classifier-only"

    def to_dict(self) -> dict:
        return {
            "times_seconds": self.times_seconds,
            "mean_seconds": self.mean_seconds,
            "percent_of_realtime": self.percent_of_realtime,
            "runs": self.runs,
            "clip_duration_seconds": self.clip_duration_seconds,
            "scope": self.scope,
        }


def evaluate(
    model: MlpModel,
    evaluation: list[FeatureVector],
    threshold: float = 0.5,
) -> EvalReport:
    """Score a model on a feature set: eval-mode predictions, decision
    fake iff likelihood >= threshold (the boundary counts as fake)."""
    predictions = predict(model, evaluation, threshold=threshold)
    decisions = np.array([p.decision for p in predictions], dtype=np.int64)
    actual = np.array([p.label for p in predictions], dtype=np.int64)

    n = len(evaluation)
    counts = {
        pred: {
            act: int(np.sum((decisions == pi) & (actual == ai)))
            for ai, act in enumerate(_CLASSES)
        }
        for pi, pred in enumerate(_CLASSES)
    }
    percent = {
        pred: {act: 100.0 * counts[pred][act] / n for act in _CLASSES}
        for pred in _CLASSES
    }
    correct = decisions == actual

    per_class: dict[str, float] = {}
    class_of = np.array([v.sound_class for v in evaluation])
    for sound_class in sorted(set(class_of)):
        members = class_of == sound_class
        per_class[str(sound_class)] = float(np.mean(correct[members]))

    return EvalReport(
        overall_accuracy=float(np.mean(correct)),
        confusion_counts=counts,
        confusion_percent=percent,
        per_class_accuracy=per_class,
        n_examples=n,
        threshold=threshold,
    )


def benchmark_inference(
    model: MlpModel,
    sample: FeatureVector | EmbeddingRecord,
    runs: int = 100,
    clip_duration: float = CLIP_DURATION_SECONDS,
) -> TimingReport:
    """Time single-sample inference over ``runs`` repetitions.

    Given an EmbeddingRecord the timed path includes time averaging; a
    FeatureVector times the forward pass alone. One untimed warm-up run
    precedes measurement. Runs execute sequentially on the calling thread.
    """
    if runs < 1:
        raise ConfigError(f"runs must be >= 1, got {runs}")

    if isinstance(sample, EmbeddingRecord):
        def infer() -> None:
            features = time_average(sample).features
            forward(model, features[None, :], mode="eval")
    else:
        features = sample.features

        def infer() -> None:
            forward(model, features[None, :], mode="eval")

    infer()  # warm-up, excluded from statistics
    times: list[float] = []
    for _ in range(runs):
        t0 = time.perf_counter()
        infer()
        times.append(time.perf_counter() - t0)

    mean = sum(times) / runs
    return TimingReport(
        times_seconds=times,
        mean_seconds=mean,
        percent_of_realtime=100.0 * mean / clip_duration,
        runs=runs,
        clip_duration_seconds=clip_duration,
    )
