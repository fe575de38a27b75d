"""Statistical comparison of detector variants and generator-quality
analysis.

The Mann-Whitney U statistic is computed from rank sums with midranks for
ties. For small tie-free samples (max(n1, n2) <= 12) the two-sided p-value
is exact: the null distribution of U is counted by dynamic programming
over rank subsets and the p-value is kept as an exact rational. Larger or
tied samples fall back to the normal approximation with tie-corrected
variance and continuity correction.

Generator quality uses the detector's BCE against the fake target as a
hardness score (higher = harder to detect) and correlates it per track
with externally supplied FAD scores.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CorrelationError, ValidationError
from .mlp import MlpModel, bce_loss, forward
from .records import EmbeddingRecord, time_average

EXACT_MAX_N = 12


@dataclass
class UTestResult:
    """U is reported for the first sample; p is two-sided (doubled and
    capped at 1). ``p_rational`` is set only on the exact path."""

    u: float
    p: float
    n1: int
    n2: int
    method: str  # "exact" | "normal_approx"
    p_rational: Fraction | None = None

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "p": self.p,
            "n1": self.n1,
            "n2": self.n2,
            "method": self.method,
            "p_rational": str(self.p_rational) if self.p_rational is not None else None,
        }


def mann_whitney_u(sample_a: Sequence[float], sample_b: Sequence[float]) -> UTestResult:
    """Two-sided Mann-Whitney U test of sample_a against sample_b."""
    a = [float(x) for x in sample_a]
    b = [float(x) for x in sample_b]
    if not a or not b:
        raise ValidationError("both samples must be non-empty")
    n1, n2 = len(a), len(b)

    ranks = _midranks(a + b)
    r1 = sum(ranks[:n1])
    u = r1 - n1 * (n1 + 1) / 2.0

    has_ties = len(set(a + b)) < n1 + n2
    if not has_ties and max(n1, n2) <= EXACT_MAX_N:
        p_rational = _exact_two_sided_p(n1, n2, int(round(u)))
        return UTestResult(
            u=u, p=float(p_rational), n1=n1, n2=n2,
            method="exact", p_rational=p_rational,
        )

    mu = n1 * n2 / 2.0
    sigma = math.sqrt(_tie_corrected_variance(ranks, n1, n2))
    if sigma == 0.0:
        return UTestResult(u=u, p=1.0, n1=n1, n2=n2, method="normal_approx")
    z = max(0.0, abs(u - mu) - 0.5) / sigma  # continuity correction
    p = min(1.0, 2.0 * _norm_sf(z))
    return UTestResult(u=u, p=p, n1=n1, n2=n2, method="normal_approx")


def _midranks(pooled: list[float]) -> list[float]:
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        midrank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = midrank
        i = j + 1
    return ranks


def _rank_sum_counts(n1: int, total: int) -> list[int]:
    """counts[s] = number of n1-subsets of {1..total} with rank sum s."""
    max_sum = sum(range(total - n1 + 1, total + 1))
    dp = [[0] * (max_sum + 1) for _ in range(n1 + 1)]
    dp[0][0] = 1
    for rank in range(1, total + 1):
        for m in range(min(rank, n1), 0, -1):
            row, prev = dp[m], dp[m - 1]
            for s in range(max_sum, rank - 1, -1):
                c = prev[s - rank]
                if c:
                    row[s] += c
    return dp[n1]


def _exact_two_sided_p(n1: int, n2: int, u_obs: int) -> Fraction:
    min_sum = n1 * (n1 + 1) // 2
    counts = _rank_sum_counts(n1, n1 + n2)
    total = 0
    count_le = 0
    count_ge = 0
    for s, c in enumerate(counts):
        if not c:
            continue
        u = s - min_sum
        total += c
        if u <= u_obs:
            count_le += c
        if u >= u_obs:
            count_ge += c
    return min(Fraction(1), Fraction(2 * min(count_le, count_ge), total))


def _tie_corrected_variance(ranks: list[float], n1: int, n2: int) -> float:
    n = n1 + n2
    tie_term = 0.0
    run = 1
    for prev, cur in zip(sorted(ranks), sorted(ranks)[1:]):
        if cur == prev:
            run += 1
        else:
            tie_term += run**3 - run
            run = 1
    tie_term += run**3 - run
    return n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def pearson_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson r, clipped into [-1, 1]."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValidationError(f"samples must be equal-length vectors, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise ValidationError("correlation needs at least 2 points")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = math.sqrt(float(np.dot(xc, xc)))
    sy = math.sqrt(float(np.dot(yc, yc)))
    if sx == 0.0 or sy == 0.0:
        raise CorrelationError("correlation undefined: an input has zero variance")
    return float(np.clip(np.dot(xc, yc) / (sx * sy), -1.0, 1.0))


@dataclass
class GeneratorScore:
    """Mean BCE of the detector's fake-likelihoods over one generator's
    clips (higher = harder to detect) next to its challenge FAD score
    (lower = better)."""

    generator_id: str
    track: str
    detector_score: float
    n_clips: int
    fad_score: float | None = None

    def to_dict(self) -> dict:
        return {
            "generator_id": self.generator_id,
            "track": self.track,
            "detector_score": self.detector_score,
            "n_clips": self.n_clips,
            "fad_score": self.fad_score,
        }


def score_generators(
    model: MlpModel, fake_records: Sequence[EmbeddingRecord]
) -> list[GeneratorScore]:
    """Per-generator mean BCE of the detector against the fake target.

    Clips run through the model one at a time and per-clip losses are
    combined with an exactly rounded sum, so clip order never changes a
    score. Output is sorted by (track, generator_id).
    """
    losses: dict[tuple[str, str], list[float]] = {}
    for record in fake_records:
        if record.label != 1:
            raise ValidationError(f"{record.clip_id}: generator scoring needs fake records only")
        record.validate()
        features = time_average(record).features
        y_hat, _ = forward(model, features[None, :], mode="eval")
        key = (record.track, record.generator_id)
        losses.setdefault(key, []).append(bce_loss(1.0, y_hat[0]))

    return [
        GeneratorScore(
            generator_id=generator_id,
            track=track,
            detector_score=math.fsum(clip_losses) / len(clip_losses),
            n_clips=len(clip_losses),
        )
        for (track, generator_id), clip_losses in sorted(losses.items())
    ]


def load_fad_csv(path: str | Path) -> dict[tuple[str, str], float]:
    """Read the challenge's FAD table: header generator_id,track,fad_score."""
    table: dict[tuple[str, str], float] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        expected = {"generator_id", "track", "fad_score"}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise ValidationError(
                f"FAD csv must have header generator_id,track,fad_score, got {reader.fieldnames}"
            )
        for row in reader:
            table[(row["generator_id"], row["track"])] = float(row["fad_score"])
    return table


def attach_fad_scores(
    scores: list[GeneratorScore], fad_table: dict[tuple[str, str], float]
) -> list[str]:
    """Fill fad_score in place; returns a warning per generator missing
    from the table (those stay None and drop out of correlations)."""
    warnings = []
    for score in scores:
        fad = fad_table.get((score.generator_id, score.track))
        if fad is None:
            warnings.append(
                f"generator {score.generator_id} (track {score.track}) missing from FAD csv; skipped"
            )
        else:
            score.fad_score = fad
    return warnings


@dataclass
class TrackCorrelation:
    track: str
    n: int
    r: float
    generators: list[GeneratorScore]

    def to_dict(self) -> dict:
        return {
            "track": self.track,
            "n": self.n,
            "r": self.r,
            "generators": [g.to_dict() for g in self.generators],
        }


@dataclass
class CorrelationReport:
    tracks: list[TrackCorrelation]
    warnings: list[str]

    def to_dict(self) -> dict:
        return {
            "tracks": [t.to_dict() for t in self.tracks],
            "warnings": self.warnings,
        }


def correlate_tracks(scores: Sequence[GeneratorScore]) -> CorrelationReport:
    """Per-track Pearson r between detector hardness and FAD.

    Generators without a FAD score are excluded; a track with fewer than
    2 scorable generators is skipped with a warning in the report.
    """
    warnings: list[str] = []
    by_track: dict[str, list[GeneratorScore]] = {}
    for score in scores:
        if score.fad_score is None:
            continue
        by_track.setdefault(score.track, []).append(score)

    tracks: list[TrackCorrelation] = []
    for track in sorted(by_track):
        members = sorted(by_track[track], key=lambda s: s.generator_id)
        if len(members) < 2:
            warnings.append(
                f"track {track}: only {len(members)} generator(s) with FAD scores; skipped"
            )
            continue
        r = pearson_correlation(
            [m.detector_score for m in members], [m.fad_score for m in members]
        )
        tracks.append(TrackCorrelation(track=track, n=len(members), r=r, generators=members))
    return CorrelationReport(tracks=tracks, warnings=warnings)
