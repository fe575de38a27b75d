"""Human-readable report rendering and the JSON schemas for every
machine-readable output.

JSON files are written deterministically (sorted keys, fixed separators,
no timestamps) so identical invocations produce byte-identical artifacts.
Percentages are rounded at rendering time only; stored values stay exact.
"""

from __future__ import annotations

import json
from pathlib import Path

from .analysis import CorrelationReport, UTestResult
from .evaluation import EvalReport, TimingReport


def write_json(data: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write("\n")


def dumps_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def render_confusion(report: EvalReport, name: str = "") -> str:
    """Confusion matrix as percent of the evaluation set, counts alongside."""
    header = f"Confusion matrix{' - ' + name if name else ''} (n={report.n_examples})"
    lines = [
        header,
        f"{'Predicted':<12}{'Nonfake (%)':>14}{'Fake (%)':>14}{'Nonfake (#)':>14}{'Fake (#)':>12}",
    ]
    for pred in ("nonfake", "fake"):
        pct = report.confusion_percent[pred]
        cnt = report.confusion_counts[pred]
        lines.append(
            f"{pred.capitalize():<12}{pct['nonfake']:>14.1f}{pct['fake']:>14.1f}"
            f"{cnt['nonfake']:>14d}{cnt['fake']:>12d}"
        )
    lines.append(f"Overall accuracy: {100.0 * report.overall_accuracy:.2f}%")
    return "\n".join(lines)


def render_per_class(report: EvalReport) -> str:
    classes = list(report.per_class_accuracy)
    width = max(len(c) for c in classes) + 2
    lines = ["Per-class accuracy (%)"]
    for sound_class in classes:
        lines.append(
            f"{sound_class:<{width}}{100.0 * report.per_class_accuracy[sound_class]:.1f}"
        )
    return "\n".join(lines)


def render_timing(report: TimingReport, name: str = "") -> str:
    label = f" - {name}" if name else ""
    return (
        f"Inference time{label} ({report.scope}, {report.runs} runs): "
        f"mean {report.mean_seconds * 1000.0:.3f} ms "
        f"= {report.percent_of_realtime:.3f}% of the {report.clip_duration_seconds:g} s clip"
    )


def render_utest(result: UTestResult, name_a: str = "A", name_b: str = "B") -> str:
    verdict = "rejected" if result.p < 0.05 else "not rejected"
    return (
        f"Mann-Whitney U ({name_a} vs {name_b}): U={result.u:g}, "
        f"p={result.p:.4g} ({result.method}); null hypothesis {verdict} at 0.05"
    )


def render_correlation(report: CorrelationReport) -> str:
    lines = ["Detector score vs FAD correlation"]
    for track in report.tracks:
        lines.append(f"Track {track.track}: r = {track.r:.2f} over {track.n} systems")
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines)


_CONFUSION_CELLS = {
    "type": "object",
    "properties": {
        "nonfake": {"type": "object"},
        "fake": {"type": "object"},
    },
    "required": ["nonfake", "fake"],
}

SPLIT_MANIFEST_SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer"},
        "proportions": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 3,
            "maxItems": 3,
        },
        "train": {"type": "array", "items": {"type": "string"}},
        "validation": {"type": "array", "items": {"type": "string"}},
        "evaluation": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["seed", "proportions", "train", "validation", "evaluation"],
    "additionalProperties": False,
}

RUN_SUMMARY_SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer"},
        "train_loss": {"type": "array", "items": {"type": "number"}},
        "train_accuracy": {"type": "array", "items": {"type": "number"}},
        "checkpoints": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "epoch": {"type": "integer"},
                    "validation_accuracy": {"type": "number"},
                },
                "required": ["epoch", "validation_accuracy"],
            },
        },
        "selected_epoch": {"type": "integer"},
        "selected_validation_accuracy": {"type": "number"},
        "evaluation_accuracy": {"type": "number"},
    },
    "required": [
        "seed",
        "train_loss",
        "train_accuracy",
        "checkpoints",
        "selected_epoch",
        "selected_validation_accuracy",
        "evaluation_accuracy",
    ],
}

COMBINED_SUMMARY_SCHEMA = {
    "type": "object",
    "properties": {
        "embedding": {"type": ["string", "null"]},
        "config": {"type": "object"},
        "run_seeds": {"type": "array", "items": {"type": "integer"}},
        "evaluation_accuracies": {"type": "array", "items": {"type": "number"}},
        "mean": {"type": "number"},
        "std": {"type": "number"},
        "formatted": {"type": "string"},
    },
    "required": ["config", "run_seeds", "evaluation_accuracies", "mean", "std", "formatted"],
}

EVAL_REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "overall_accuracy": {"type": "number", "minimum": 0, "maximum": 1},
        "confusion_counts": _CONFUSION_CELLS,
        "confusion_percent": _CONFUSION_CELLS,
        "per_class_accuracy": {"type": "object"},
        "n_examples": {"type": "integer", "minimum": 1},
        "threshold": {"type": "number"},
    },
    "required": [
        "overall_accuracy",
        "confusion_counts",
        "confusion_percent",
        "per_class_accuracy",
        "n_examples",
        "threshold",
    ],
}

TIMING_REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "times_seconds": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "mean_seconds": {"type": "number", "minimum": 0},
        "percent_of_realtime": {"type": "number", "minimum": 0},
        "runs": {"type": "integer", "minimum": 1},
        "clip_duration_seconds": {"type": "number", "exclusiveMinimum": 0},
        "scope": {"type": "string"},
    },
    "required": [
        "times_seconds",
        "mean_seconds",
        "percent_of_realtime",
        "runs",
        "clip_duration_seconds",
        "scope",
    ],
}

UTEST_RESULT_SCHEMA = {
    "type": "object",
    "properties": {
        "u": {"type": "number", "minimum": 0},
        "p": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "n1": {"type": "integer", "minimum": 1},
        "n2": {"type": "integer", "minimum": 1},
        "method": {"enum": ["exact", "normal_approx"]},
        "p_rational": {"type": ["string", "null"]},
    },
    "required": ["u", "p", "n1", "n2", "method"],
}

CORRELATION_REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "tracks": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "track": {"type": "string"},
                    "n": {"type": "integer", "minimum": 2},
                    "r": {"type": "number", "minimum": -1, "maximum": 1},
                    "generators": {"type": "array", "items": {"type": "object"}},
                },
                "required": ["track", "n", "r", "generators"],
            },
        },
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["tracks", "warnings"],
}
