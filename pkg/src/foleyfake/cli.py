"""Command-line surface: one subcommand per pipeline stage plus a
``pipeline`` convenience command that chains them.

Every command is deterministic given its flags and input files; nothing
is seeded from the wall clock. Exit codes: 0 success, 1 runtime failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import reports
from .analysis import (
    attach_fad_scores,
    correlate_tracks,
    load_fad_csv,
    mann_whitney_u,
    score_generators,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .container import load_container
from .errors import ConfigError, DetectorError, ValidationError
from .evaluation import benchmark_inference, evaluate
from .records import EmbeddingRecord, time_average
from .splits import DEFAULT_PROPORTIONS, DatasetSplit, balance_training_set, split_dataset
from .training import TrainConfig, run_many

_BALANCE_OFFSET = 4 << 24


@dataclass
class ExperimentConfig:
    """One experiment: paths, split settings, and the training protocol."""

    container: Path
    out_dir: Path
    seed: int
    fad_csv: Path | None = None
    embedding: str | None = None
    proportions: tuple[float, float, float] = DEFAULT_PROPORTIONS
    lr: float = 7e-4
    batch_size: int = 128
    epochs: int = 100
    checkpoint_every: int = 10
    threshold: float = 0.5
    dropout_p: float = 0.2
    runs: int = 10
    jobs: int = 1
    hidden_dims: tuple[int, ...] = (512, 1024, 512)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as handle:
                raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path}: invalid JSON ({exc})") from exc
        for key in ("container", "out_dir", "seed"):
            if key not in raw:
                raise ConfigError(f"config {path}: missing required key {key!r}")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"config {path}: unknown keys {sorted(unknown)}")
        config = cls(
            container=Path(raw["container"]),
            out_dir=Path(raw["out_dir"]),
            seed=int(raw["seed"]),
            fad_csv=Path(raw["fad_csv"]) if raw.get("fad_csv") else None,
            embedding=raw.get("embedding"),
            proportions=tuple(raw.get("proportions", DEFAULT_PROPORTIONS)),
            lr=float(raw.get("lr", 7e-4)),
            batch_size=int(raw.get("batch_size", 128)),
            epochs=int(raw.get("epochs", 100)),
            checkpoint_every=int(raw.get("checkpoint_every", 10)),
            threshold=float(raw.get("threshold", 0.5)),
            dropout_p=float(raw.get("dropout_p", 0.2)),
            runs=int(raw.get("runs", 10)),
            jobs=int(raw.get("jobs", 1)),
            hidden_dims=tuple(raw.get("hidden_dims", (512, 1024, 512))),
        )
        if not config.container.exists():
            raise ConfigError(f"config {path}: container {config.container} does not exist")
        if config.fad_csv is not None and not config.fad_csv.exists():
            raise ConfigError(f"config {path}: fad_csv {config.fad_csv} does not exist")
        return config

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            lr=self.lr,
            batch_size=self.batch_size,
            epochs=self.epochs,
            checkpoint_every=self.checkpoint_every,
            threshold=self.threshold,
            dropout_p=self.dropout_p,
            seed=self.seed,
            runs=self.runs,
            hidden_dims=self.hidden_dims,
        )


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DetectorError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foleyfake",
        description="Train, evaluate, and statistically analyze detectors of "
        "synthesizer-generated environmental audio on precomputed embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="partition a container into train/validation/evaluation")
    p.add_argument("--container", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--proportions", default=None, help="comma-separated, e.g. 0.7,0.1,0.2")
    p.add_argument("--out", required=True, help="path of the split manifest JSON")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="run the training protocol and write checkpoints")
    p.add_argument("--container", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--lr", type=float, default=7e-4)
    p.add_argument("--dropout", type=float, default=0.2)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--checkpoint-every", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--hidden-dims", default=None, help="comma-separated, default 512,1024,512")
    p.add_argument("--embedding", default=None, help="embedding name tag for the summary")
    p.add_argument("--quiet", action="store_true", help="suppress per-epoch progress on stderr")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="confusion matrix and per-class accuracy for a model")
    p.add_argument("--model", required=True)
    p.add_argument("--container", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--subset", default="evaluation", choices=("train", "validation", "evaluation"))
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", default=None, help="report JSON path; omit to print JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="time single-sample inference")
    p.add_argument("--model", required=True)
    p.add_argument("--container", required=True)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="seed for picking the sample")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("compare", help="Mann-Whitney U test between two run summaries")
    p.add_argument("--a", required=True, help="combined summary JSON of variant A")
    p.add_argument("--b", required=True, help="combined summary JSON of variant B")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("correlate", help="detector hardness vs FAD, per track")
    p.add_argument("--model", required=True)
    p.add_argument("--container", required=True)
    p.add_argument("--fad-csv", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("pipeline", help="split + train + evaluate (+ correlate) from a config file")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_pipeline)

    return parser


def _parse_proportions(text: str | None) -> tuple[float, float, float]:
    if text is None:
        return DEFAULT_PROPORTIONS
    try:
        parts = tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"invalid proportions {text!r}: {exc}") from exc
    if len(parts) != 3:
        raise ConfigError(f"proportions need 3 comma-separated values, got {text!r}")
    return parts


def _parse_hidden_dims(text: str | None) -> tuple[int, ...]:
    if text is None:
        return (512, 1024, 512)
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"invalid hidden dims {text!r}: {exc}") from exc


def _load_records(path: str | Path) -> list[EmbeddingRecord]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"container {path} does not exist")
    return load_container(path)


def _load_manifest(path: str | Path) -> DatasetSplit:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifest {path} does not exist")
    with open(path, encoding="utf-8") as handle:
        return DatasetSplit.from_dict(json.load(handle))


def _subset_features(records: list[EmbeddingRecord], ids: list[str]):
    by_id = {r.clip_id: r for r in records}
    missing = [cid for cid in ids if cid not in by_id]
    if missing:
        raise ValidationError(f"{len(missing)} manifest ids missing from container, e.g. {missing[0]!r}")
    return [time_average(by_id[cid]) for cid in ids]


def cmd_split(args: argparse.Namespace) -> int:
    records = _load_records(args.container)
    split = split_dataset(records, _parse_proportions(args.proportions), args.seed)
    reports.write_json(split.to_dict(), args.out)
    print(
        f"split {len(records)} records into {len(split.train)}/"
        f"{len(split.validation)}/{len(split.evaluation)}"
    )
    return 0


def _train_to_dir(
    records: list[EmbeddingRecord],
    split: DatasetSplit,
    config: TrainConfig,
    out_dir: Path,
    jobs: int,
    embedding: str | None,
    quiet: bool,
) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    balanced_ids = balance_training_set(split.train, records, seed=config.seed + _BALANCE_OFFSET)
    train_features = _subset_features(records, balanced_ids)
    val_features = _subset_features(records, split.validation)
    eval_features = _subset_features(records, split.evaluation)

    def sink(run_seed: int, epoch: int, model) -> None:
        save_checkpoint(model, out_dir / f"{run_seed}_{epoch}.mlpc")

    log = None if quiet else (lambda msg: print(msg, file=sys.stderr))
    outcome = run_many(
        train_features, val_features, eval_features, config,
        jobs=jobs, checkpoint_sink=sink, log=log,
    )

    for result, accuracy in zip(outcome.results, outcome.evaluation_accuracies):
        summary = result.summary_dict()
        summary["evaluation_accuracy"] = accuracy
        reports.write_json(summary, out_dir / f"run_{result.seed}.json")

    combined = {
        "embedding": embedding,
        "config": config.to_dict(),
        "run_seeds": [r.seed for r in outcome.results],
        "selected_epochs": [r.selected_epoch for r in outcome.results],
        "evaluation_accuracies": outcome.evaluation_accuracies,
        "mean": outcome.mean,
        "std": outcome.std,
        "formatted": outcome.formatted(),
    }
    reports.write_json(combined, out_dir / "summary.json")
    print(f"evaluation accuracy over {config.runs} run(s): {outcome.formatted()}")
    return combined


def cmd_train(args: argparse.Namespace) -> int:
    records = _load_records(args.container)
    split = _load_manifest(args.manifest)
    config = TrainConfig(
        lr=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        checkpoint_every=args.checkpoint_every,
        threshold=args.threshold,
        dropout_p=args.dropout,
        seed=args.seed,
        runs=args.runs,
        hidden_dims=_parse_hidden_dims(args.hidden_dims),
    )
    _train_to_dir(
        records, split, config, Path(args.out), args.jobs, args.embedding, args.quiet
    )
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    model, _ = load_checkpoint(args.model)
    records = _load_records(args.container)
    split = _load_manifest(args.manifest)
    features = _subset_features(records, split.subset(args.subset))
    report = evaluate(model, features, threshold=args.threshold)
    if args.out:
        reports.write_json(report.to_dict(), args.out)
        print(reports.render_confusion(report))
        print()
        print(reports.render_per_class(report))
    else:
        print(reports.dumps_json(report.to_dict()))
    return 0


def cmd_benchmark(args: argparse.Namespace) -> int:
    model, _ = load_checkpoint(args.model)
    records = _load_records(args.container)
    if not records:
        raise ValidationError("container has no records to benchmark on")
    rng = np.random.Generator(np.random.PCG64(args.seed))
    sample = records[int(rng.integers(0, len(records)))]
    report = benchmark_inference(model, sample, runs=args.runs)
    if args.out:
        reports.write_json(report.to_dict(), args.out)
        print(reports.render_timing(report))
    else:
        print(reports.dumps_json(report.to_dict()))
    return 0


def _accuracies_from_summary(path: str) -> list[float]:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    accuracies = data.get("evaluation_accuracies")
    if not accuracies:
        raise ValidationError(f"{path}: no evaluation_accuracies to compare")
    return [float(a) for a in accuracies]


def cmd_compare(args: argparse.Namespace) -> int:
    result = mann_whitney_u(
        _accuracies_from_summary(args.a), _accuracies_from_summary(args.b)
    )
    if args.out:
        reports.write_json(result.to_dict(), args.out)
        print(reports.render_utest(result, args.a, args.b))
    else:
        print(reports.dumps_json(result.to_dict()))
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    model, _ = load_checkpoint(args.model)
    records = _load_records(args.container)
    fad_path = Path(args.fad_csv)
    if not fad_path.exists():
        raise FileNotFoundError(f"FAD csv {fad_path} does not exist")
    fake = [r for r in records if r.label == 1]
    scores = score_generators(model, fake)
    warnings = attach_fad_scores(scores, load_fad_csv(fad_path))
    report = correlate_tracks(scores)
    report.warnings = warnings + report.warnings
    if args.out:
        reports.write_json(report.to_dict(), args.out)
        print(reports.render_correlation(report))
    else:
        print(reports.dumps_json(report.to_dict()))
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config)
    out_dir = config.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    records = _load_records(config.container)
    split = split_dataset(records, config.proportions, config.seed)
    reports.write_json(split.to_dict(), out_dir / "split.json")

    combined = _train_to_dir(
        records, split, config.train_config(), out_dir,
        config.jobs, config.embedding, args.quiet,
    )

    # report the confusion matrix of the best run (highest eval accuracy)
    accuracies = combined["evaluation_accuracies"]
    best_index = int(np.argmax(accuracies))
    best_seed = combined["run_seeds"][best_index]
    best_epoch = combined["selected_epochs"][best_index]
    best_model, _ = load_checkpoint(out_dir / f"{best_seed}_{best_epoch}.mlpc")

    eval_features = _subset_features(records, split.evaluation)
    report = evaluate(best_model, eval_features, threshold=config.threshold)
    reports.write_json(report.to_dict(), out_dir / "eval_report.json")
    print(reports.render_confusion(report, name=config.embedding or ""))
    print()
    print(reports.render_per_class(report))

    rng = np.random.Generator(np.random.PCG64(config.seed))
    sample = records[int(rng.integers(0, len(records)))]
    timing = benchmark_inference(best_model, sample, runs=100)
    reports.write_json(timing.to_dict(), out_dir / "timing.json")
    print(reports.render_timing(timing, name=config.embedding or ""))

    if config.fad_csv is not None:
        fake = [r for r in records if r.label == 1]
        scores = score_generators(best_model, fake)
        warnings = attach_fad_scores(scores, load_fad_csv(config.fad_csv))
        correlation = correlate_tracks(scores)
        correlation.warnings = warnings + correlation.warnings
        reports.write_json(correlation.to_dict(), out_dir / "correlation.json")
        print(reports.render_correlation(correlation))

    return 0


if __name__ == "__main__":
    sys.exit(main())
