"""Dataset partitioning and class balancing.

Splitting is stratified by (sound_class, label) so class-wise evaluation
has stable support in every subset; per-stratum subset sizes follow the
largest-remainder rule with ties resolved toward train. Balancing
equalizes label counts by random oversampling of the minority class.
Both operations are deterministic given their seed.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ValidationError
from .records import EmbeddingRecord

DEFAULT_PROPORTIONS = (0.7, 0.1, 0.2)

_SUBSETS = ("train", "validation", "evaluation")


@dataclass
class DatasetSplit:
    """Disjoint clip-id lists covering a manifest, plus how they were made."""

    train: list[str]
    validation: list[str]
    evaluation: list[str]
    seed: int
    proportions: tuple[float, float, float] = field(default=DEFAULT_PROPORTIONS)

    def subset(self, name: str) -> list[str]:
        if name not in _SUBSETS:
            raise ConfigError(f"unknown subset {name!r}; expected one of {_SUBSETS}")
        return getattr(self, name)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "proportions": list(self.proportions),
            "train": list(self.train),
            "validation": list(self.validation),
            "evaluation": list(self.evaluation),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetSplit":
        return cls(
            train=list(data["train"]),
            validation=list(data["validation"]),
            evaluation=list(data["evaluation"]),
            seed=int(data["seed"]),
            proportions=tuple(data["proportions"]),
        )


def split_dataset(
    manifest: list[EmbeddingRecord],
    proportions: tuple[float, float, float] = DEFAULT_PROPORTIONS,
    seed: int = 0,
) -> DatasetSplit:
    """Partition a manifest into train/validation/evaluation clip-id lists.

    Stratified by (sound_class, label). Within each stratum indices are
    shuffled with a generator seeded by ``seed`` and quotas are assigned
    by largest remainder, ties going to the earlier subset (train first).
    """
    if not manifest:
        raise ConfigError("manifest is empty")
    if len(proportions) != 3:
        raise ConfigError(f"proportions must have 3 entries, got {len(proportions)}")
    if abs(sum(proportions) - 1.0) > 1e-9:
        raise ConfigError(f"proportions {proportions} do not sum to 1")
    if any(p < 0 for p in proportions):
        raise ConfigError(f"proportions {proportions} must be non-negative")

    ids = [r.clip_id for r in manifest]
    if len(set(ids)) != len(ids):
        raise ValidationError("manifest contains duplicate clip_ids")

    strata: dict[tuple[str, int], list[str]] = defaultdict(list)
    for record in manifest:
        strata[(record.sound_class, record.label)].append(record.clip_id)

    rng = np.random.Generator(np.random.PCG64(seed))
    buckets: dict[str, list[str]] = {name: [] for name in _SUBSETS}
    for key in sorted(strata):
        members = strata[key]
        order = rng.permutation(len(members))
        shuffled = [members[i] for i in order]
        counts = _largest_remainder(len(members), proportions)
        start = 0
        for name, quota in zip(_SUBSETS, counts):
            buckets[name].extend(shuffled[start : start + quota])
            start += quota

    return DatasetSplit(
        train=buckets["train"],
        validation=buckets["validation"],
        evaluation=buckets["evaluation"],
        seed=seed,
        proportions=tuple(proportions),
    )


def _largest_remainder(n: int, proportions: tuple[float, float, float]) -> list[int]:
    quotas = [n * p for p in proportions]
    counts = [int(q) for q in quotas]
    leftover = n - sum(counts)
    # ties broken toward the earlier subset: sort by (-remainder, position)
    order = sorted(range(3), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in range(leftover):
        counts[order[i]] += 1
    return counts


def balance_training_set(
    train_ids: list[str],
    manifest: list[EmbeddingRecord],
    seed: int = 0,
) -> list[str]:
    """Equalize label counts by oversampling the minority class.

    Returns the original ids (every one kept at least once) followed by
    minority-class ids drawn with replacement until both labels are
    equally represented. Deterministic per seed.
    """
    if not train_ids:
        raise ValidationError("train_ids is empty")
    label_of = {r.clip_id: r.label for r in manifest}
    try:
        labels = [label_of[cid] for cid in train_ids]
    except KeyError as exc:
        raise ValidationError(f"train id {exc} not found in manifest") from exc

    by_label: dict[int, list[str]] = {0: [], 1: []}
    for cid, label in zip(train_ids, labels):
        by_label[label].append(cid)
    if not by_label[0] or not by_label[1]:
        raise ValidationError("training set needs both labels to balance")

    n0, n1 = len(by_label[0]), len(by_label[1])
    if n0 == n1:
        return list(train_ids)
    minority = by_label[0] if n0 < n1 else by_label[1]
    deficit = abs(n0 - n1)
    rng = np.random.Generator(np.random.PCG64(seed))
    extra = [minority[i] for i in rng.integers(0, len(minority), size=deficit)]
    return list(train_ids) + extra
