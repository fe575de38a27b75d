from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as scipy_stats

from foleyfake.analysis import (
    GeneratorScore,
    attach_fad_scores,
    correlate_tracks,
    load_fad_csv,
    mann_whitney_u,
    pearson_correlation,
    score_generators,
)
from foleyfake.errors import CorrelationError, ValidationError
from foleyfake.mlp import bce_loss, forward, init_model
from foleyfake.records import time_average

from conftest import make_record


def enumeration_oracle(sample_a, sample_b) -> Fraction:
    """Brute-force two-sided exact p: enumerate every way the pooled ranks
    could be assigned to the first sample."""
    n1, n2 = len(sample_a), len(sample_b)
    pooled = sorted(sample_a + sample_b)
    rank_of = {value: index + 1 for index, value in enumerate(pooled)}
    u_obs = sum(rank_of[v] for v in sample_a) - n1 * (n1 + 1) / 2
    total = 0
    count_le = 0
    count_ge = 0
    for subset in itertools.combinations(range(1, n1 + n2 + 1), n1):
        u = sum(subset) - n1 * (n1 + 1) / 2
        total += 1
        if u <= u_obs:
            count_le += 1
        if u >= u_obs:
            count_ge += 1
    return min(Fraction(1), Fraction(2 * min(count_le, count_ge), total))


class TestMannWhitney:
    def test_identical_samples_cap_at_one(self):
        result = mann_whitney_u([1, 2, 3], [1, 2, 3])
        assert result.u == 4.5
        assert result.p == 1.0
        assert result.method == "normal_approx"  # ties force the approximation

    def test_complete_separation_n10(self):
        a = list(range(10))
        b = [x + 100 for x in a]
        result = mann_whitney_u(a, b)
        assert result.method == "exact"
        assert result.u == 0.0
        assert result.p_rational == Fraction(2, 184756)
        assert abs(result.p - 2 / 184756) / (2 / 184756) < 1e-15
        assert result.p < 0.05

    def test_exact_matches_enumeration_oracle_spot_checks(self):
        cases = [
            ([1, 5, 9], [2, 3, 4]),
            ([10, 20], [1, 2, 3, 4, 5]),
            ([1], [2]),
            ([3, 7, 11, 13], [2, 4, 6, 8, 10]),
        ]
        for a, b in cases:
            result = mann_whitney_u(a, b)
            assert result.method == "exact"
            assert result.p_rational == enumeration_oracle(a, b)

    def test_symmetry_under_swap(self):
        rng = np.random.default_rng(0)
        a = list(rng.normal(size=8))
        b = list(rng.normal(size=5))
        r_ab = mann_whitney_u(a, b)
        r_ba = mann_whitney_u(b, a)
        assert r_ab.u + r_ba.u == len(a) * len(b)
        assert r_ab.p == r_ba.p
        assert r_ab.p_rational == r_ba.p_rational

    def test_u_range_invariant(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = list(rng.normal(size=rng.integers(1, 15)))
            b = list(rng.normal(size=rng.integers(1, 15)))
            result = mann_whitney_u(a, b)
            assert 0 <= result.u <= len(a) * len(b)
            assert 0 < result.p <= 1

    def test_shift_monotonicity_drives_p_down(self):
        # shifting b far above a makes every pair a < b: U(a,b) hits its
        # floor 0, U(b,a) its ceiling n1*n2, and p collapses below any alpha
        rng = np.random.default_rng(2)
        a = list(rng.normal(size=10))
        b = list(rng.normal(size=10))
        shifted = [x + 1000.0 for x in b]
        result = mann_whitney_u(a, shifted)
        assert result.u == 0.0
        assert mann_whitney_u(shifted, a).u == len(a) * len(b)
        assert result.p < 0.001

    def test_normal_approximation_against_scipy(self):
        rng = np.random.default_rng(3)
        a = list(rng.normal(size=25))
        b = list(rng.normal(loc=0.7, size=30))
        result = mann_whitney_u(a, b)
        assert result.method == "normal_approx"
        reference = scipy_stats.mannwhitneyu(
            a, b, alternative="two-sided", method="asymptotic", use_continuity=True
        )
        assert result.u == pytest.approx(float(reference.statistic))
        assert result.p == pytest.approx(float(reference.pvalue), rel=1e-12)

    def test_ties_use_tie_corrected_approximation(self):
        a = [1, 1, 2, 2, 3]
        b = [2, 3, 3, 4, 4]
        result = mann_whitney_u(a, b)
        assert result.method == "normal_approx"
        reference = scipy_stats.mannwhitneyu(
            a, b, alternative="two-sided", method="asymptotic", use_continuity=True
        )
        assert result.p == pytest.approx(float(reference.pvalue), rel=1e-12)

    def test_all_identical_values(self):
        result = mann_whitney_u([5, 5, 5], [5, 5])
        assert result.p == 1.0

    def test_empty_sample_rejected(self):
        with pytest.raises(ValidationError):
            mann_whitney_u([], [1, 2])
        with pytest.raises(ValidationError):
            mann_whitney_u([1, 2], [])


class TestPearson:
    def test_exact_anti_linearity(self):
        xs = [1.0, 2.0, 3.0, 4.0]
        ys = [-2 * x + 3 for x in xs]
        assert pearson_correlation(xs, ys) == pytest.approx(-1.0, abs=1e-12)

    def test_identity(self):
        xs = [0.5, 1.5, -2.0]
        assert pearson_correlation(xs, xs) == pytest.approx(1.0, abs=1e-12)

    def test_hand_computed_value(self):
        assert pearson_correlation([1, 2, 3], [6, 4, 5]) == pytest.approx(-0.5, abs=1e-12)

    def test_affine_invariance_and_sign_flip(self):
        rng = np.random.default_rng(4)
        xs = rng.normal(size=30)
        ys = rng.normal(size=30)
        base = pearson_correlation(xs, ys)
        assert pearson_correlation(2.5 * xs + 7, ys) == pytest.approx(base, abs=1e-12)
        assert pearson_correlation(xs, 0.1 * ys - 3) == pytest.approx(base, abs=1e-12)
        assert pearson_correlation(-xs, ys) == pytest.approx(-base, abs=1e-12)

    def test_zero_variance_rejected(self):
        with pytest.raises(CorrelationError):
            pearson_correlation([1, 1, 1], [1, 2, 3])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            pearson_correlation([1, 2], [1, 2, 3])
        with pytest.raises(ValidationError):
            pearson_correlation([1], [2])


def fake_records_for(generators: dict[str, tuple[str, int]], dim=4):
    """generators: generator_id -> (track, clip count)."""
    records = []
    for generator_id, (track, count) in generators.items():
        for i in range(count):
            records.append(
                make_record(
                    f"{generator_id}_{i}",
                    label=1,
                    dim=dim,
                    generator_id=generator_id,
                    track=track,
                )
            )
    return records


class TestGeneratorScores:
    def test_certain_fake_scores_zero(self):
        # drive the output to likelihood ~1 via a huge positive bias
        model = init_model(dim=4, dropout_p=0.0, seed=0, hidden_dims=(2, 2, 2))
        for w in model.weights:
            w[:] = 0.0
        model.biases[-1][:] = 60.0
        records = fake_records_for({"g1": ("A", 3)})
        scores = score_generators(model, records)
        assert len(scores) == 1
        assert scores[0].detector_score == 0.0
        assert scores[0].n_clips == 3

    def test_uncertain_model_scores_ln2(self):
        model = init_model(dim=4, dropout_p=0.0, seed=0, hidden_dims=(2, 2, 2))
        for w in model.weights:
            w[:] = 0.0
        records = fake_records_for({"g1": ("A", 2), "g2": ("B", 5)})
        scores = score_generators(model, records)
        assert all(s.detector_score == pytest.approx(math.log(2)) for s in scores)

    def test_permuting_clip_order_changes_nothing(self):
        model = init_model(dim=4, dropout_p=0.1, seed=1, hidden_dims=(4, 4, 4))
        records = fake_records_for({"g1": ("A", 7), "g2": ("A", 5)})
        forward_scores = score_generators(model, records)
        reversed_scores = score_generators(model, records[::-1])
        assert forward_scores == reversed_scores

    def test_scores_match_direct_bce_mean(self):
        model = init_model(dim=4, dropout_p=0.0, seed=2, hidden_dims=(4, 4, 4))
        records = fake_records_for({"g1": ("B", 4)})
        [score] = score_generators(model, records)
        losses = []
        for record in records:
            y_hat, _ = forward(model, time_average(record).features[None, :], mode="eval")
            losses.append(bce_loss(1.0, y_hat[0]))
        assert score.detector_score == pytest.approx(math.fsum(losses) / len(losses))

    def test_nonfake_record_rejected(self):
        model = init_model(dim=4, dropout_p=0.0, seed=0, hidden_dims=(2, 2, 2))
        with pytest.raises(ValidationError):
            score_generators(model, [make_record("real", label=0, dim=4)])


class TestCorrelateTracks:
    def make_scores(self, track, values):
        return [
            GeneratorScore(
                generator_id=f"g{track}{i}",
                track=track,
                detector_score=v,
                n_clips=1,
                fad_score=fad,
            )
            for i, (v, fad) in enumerate(values)
        ]

    def test_anti_linear_fad_gives_minus_one_per_track(self):
        scores = []
        for track in ("A", "B"):
            detector = [0.1, 0.4, 0.9, 1.3]
            scores += self.make_scores(track, [(d, -d) for d in detector])
        report = correlate_tracks(scores)
        assert [t.track for t in report.tracks] == ["A", "B"]
        for track in report.tracks:
            assert track.r == pytest.approx(-1.0)
            assert track.n == 4
        assert report.warnings == []

    def test_single_track_input(self):
        report = correlate_tracks(self.make_scores("B", [(0.1, 5.0), (0.9, 1.0)]))
        assert len(report.tracks) == 1
        assert report.tracks[0].track == "B"

    def test_undersized_track_skipped_with_warning(self):
        scores = self.make_scores("A", [(0.5, 2.0)]) + self.make_scores(
            "B", [(0.1, 5.0), (0.9, 1.0), (0.4, 3.0)]
        )
        report = correlate_tracks(scores)
        assert [t.track for t in report.tracks] == ["B"]
        assert any("track A" in w for w in report.warnings)

    def test_missing_fad_scores_excluded(self):
        scores = self.make_scores("A", [(0.1, 5.0), (0.9, 1.0), (0.4, None)])
        report = correlate_tracks(scores)
        assert report.tracks[0].n == 2


class TestFadCsv:
    def test_load_and_attach(self, tmp_path):
        path = tmp_path / "fad.csv"
        path.write_text(
            "generator_id,track,fad_score\ng_00,A,4.25\ng_01,B,9.5\n", encoding="utf-8"
        )
        table = load_fad_csv(path)
        assert table == {("g_00", "A"): 4.25, ("g_01", "B"): 9.5}
        scores = [
            GeneratorScore("g_00", "A", 0.5, 2),
            GeneratorScore("g_02", "A", 0.7, 2),
        ]
        warnings = attach_fad_scores(scores, table)
        assert scores[0].fad_score == 4.25
        assert scores[1].fad_score is None
        assert len(warnings) == 1 and "g_02" in warnings[0]

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("generator,fad\nx,1\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_fad_csv(path)
