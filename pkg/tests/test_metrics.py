"""Metric implementations against per-threshold and pairwise oracles."""

import math

import numpy as np
import pytest

from audiobench.metrics import (
    CellReport,
    ScoreRecord,
    accuracy_at,
    accuracy_at_eer,
    aggregate_categories,
    auroc,
    compute_cell_metrics,
    eer,
    roc_curve,
)

from oracles import brute_accuracy_at, brute_auroc, brute_eer, brute_roc


def _records(bona, spoof):
    recs = [ScoreRecord(f"b{i}", "bona_fide", float(s)) for i, s in enumerate(bona)]
    recs += [ScoreRecord(f"s{i}", "spoof", float(s)) for i, s in enumerate(spoof)]
    return recs


def _random_set(rng):
    """Score set with both classes; ~half the sets have heavy ties."""
    n_bona = int(rng.integers(1, 100))
    n_spoof = int(rng.integers(1, 100))
    if rng.random() < 0.5:
        pool = rng.integers(0, 8, n_bona + n_spoof) / 4.0  # coarse grid -> many ties
    else:
        pool = rng.standard_normal(n_bona + n_spoof)
    shift = rng.random() * 2
    bona = pool[:n_bona]
    spoof = pool[n_bona:] + (shift if rng.random() < 0.7 else 0.0)
    return np.asarray(bona, dtype=float), np.asarray(spoof, dtype=float)


class TestRoc:
    def test_perfect_separation_hits_corner(self):
        points = roc_curve(_records([0.1, 0.2], [0.8, 0.9]))
        assert (0.0, 1.0) in {(p[0], p[1]) for p in points}

    def test_all_tied_is_two_points(self):
        points = roc_curve(_records([0.5, 0.5], [0.5, 0.5]))
        assert [(p[0], p[1]) for p in points] == [(0.0, 0.0), (1.0, 1.0)]

    def test_monotone_and_endpoints(self):
        rng = np.random.default_rng(0)
        bona, spoof = _random_set(rng)
        points = roc_curve(_records(bona, spoof))
        fprs = [p[0] for p in points]
        tprs = [p[1] for p in points]
        assert fprs == sorted(fprs) and tprs == sorted(tprs)
        assert points[0][:2] == (0.0, 0.0) and points[-1][:2] == (1.0, 1.0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            bona, spoof = _random_set(rng)
            got = roc_curve(_records(bona, spoof))
            want = brute_roc(bona, spoof)
            assert got == want

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            roc_curve([ScoreRecord("a", "spoof", 1.0)])


class TestEer:
    def test_perfect_separation(self):
        value, _ = eer(_records([0.1, 0.2, 0.3], [0.5, 0.6, 0.7]))
        assert value == 0.0

    def test_inverted_labels_total_confusion(self):
        value, _ = eer(_records([0.5, 0.6, 0.7], [0.1, 0.2, 0.3]))
        assert value == 1.0

    def test_interleaved_hand_case(self):
        # bona {0.1, 0.9}, spoof {0.2, 0.8}: at the |FPR-FNR|-minimizing
        # threshold (0.5) each side errs exactly once, so FPR = FNR = 0.5.
        value, threshold = eer(_records([0.1, 0.9], [0.2, 0.8]))
        assert value == 0.5
        want_value, want_threshold = brute_eer(np.array([0.1, 0.9]), np.array([0.2, 0.8]))
        assert (value, threshold) == (want_value, want_threshold)

    def test_matches_brute_force_sweep(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            bona, spoof = _random_set(rng)
            assert eer(_records(bona, spoof)) == brute_eer(bona, spoof)

    def test_label_swap_score_negation_symmetry(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            bona, spoof = _random_set(rng)
            forward, _ = eer(_records(bona, spoof))
            swapped, _ = eer(_records(-spoof, -bona))
            assert forward == pytest.approx(swapped, abs=1e-12)


class TestAuroc:
    def test_perfect(self):
        assert auroc(_records([0, 0.1], [0.9, 1.0])) == 1.0

    def test_chance_on_ties(self):
        assert auroc(_records([0.5, 0.5], [0.5, 0.5])) == 0.5

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            bona, spoof = _random_set(rng)
            got = auroc(_records(bona, spoof))
            want = brute_auroc(bona, spoof)
            assert abs(got - want) < 1e-12


class TestAccuracy:
    def test_perfect(self):
        assert accuracy_at_eer(_records([0.1], [0.9])) == 1.0

    def test_balanced_classes_equals_one_minus_eer(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(1, 60))
            scores = rng.standard_normal(2 * n)
            bona, spoof = scores[:n], scores[n:] + rng.random()
            recs = _records(bona, spoof)
            e, _ = eer(recs)
            assert accuracy_at_eer(recs) == pytest.approx(1 - e, abs=1e-12)

    def test_matches_brute(self):
        rng = np.random.default_rng(5)
        bona, spoof = _random_set(rng)
        recs = _records(bona, spoof)
        _, threshold = eer(recs)
        assert accuracy_at(recs, threshold) == brute_accuracy_at(bona, spoof, threshold)


class TestMonotoneInvariance:
    @pytest.mark.parametrize("transform", [np.exp, np.arctan, lambda s: 3 * s + 7])
    def test_metrics_unchanged(self, transform):
        rng = np.random.default_rng(6)
        for _ in range(10):
            bona, spoof = _random_set(rng)
            recs = _records(bona, spoof)
            recs_t = _records(transform(bona), transform(spoof))
            assert eer(recs)[0] == eer(recs_t)[0]
            assert auroc(recs) == pytest.approx(auroc(recs_t), abs=1e-12)
            assert accuracy_at_eer(recs) == accuracy_at_eer(recs_t)
            assert [(p[0], p[1]) for p in roc_curve(recs)] == [
                (p[0], p[1]) for p in roc_curve(recs_t)
            ]


class TestScoreRecord:
    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            ScoreRecord("x", "spoof", math.nan)

    def test_rejects_unknown_label(self):
        with pytest.raises(ValueError):
            ScoreRecord("x", "genuine", 0.5)


def _cell(family, accuracy, acceptable=True, codec_id=None):
    return CellReport(
        family=family,
        severity=1,
        codec_id=codec_id,
        accuracy=accuracy,
        eer=0.1,
        auroc=0.9,
        acceptable=acceptable,
    )


class TestAggregation:
    def test_single_cell_per_category(self):
        cells = [
            _cell("gaussian_noise", 0.9),
            _cell("echo", 0.7),
            _cell("quantize", 0.5),
        ]
        got = aggregate_categories(cells)
        assert got == {"noise": 0.9, "modification": 0.7, "compression": 0.5}

    def test_two_cell_mean(self):
        cells = [_cell("gaussian_noise", 0.8), _cell("background_noise", 0.6)]
        assert aggregate_categories(cells)["noise"] == pytest.approx(0.7)

    def test_gate_excludes_unacceptable(self):
        cells = [_cell("gaussian_noise", 0.8), _cell("gaussian_noise", 0.0, acceptable=False)]
        assert aggregate_categories(cells, gate=True)["noise"] == pytest.approx(0.8)
        assert aggregate_categories(cells, gate=False)["noise"] == pytest.approx(0.4)

    def test_gate_modes_agree_when_all_acceptable(self):
        cells = [_cell("codec", 0.5, codec_id="opus"), _cell("quantize", 0.7)]
        assert aggregate_categories(cells, gate=True) == aggregate_categories(cells, gate=False)

    def test_gated_empty_category_raises(self):
        cells = [_cell("gaussian_noise", 0.8, acceptable=False)]
        with pytest.raises(ValueError):
            aggregate_categories(cells, gate=True)

    def test_auto_without_quality_info_uses_all(self):
        cells = [_cell("gaussian_noise", 0.8, acceptable=None)]
        assert aggregate_categories(cells) == {"noise": 0.8}


def test_compute_cell_metrics_shape():
    out = compute_cell_metrics(_records([0.1, 0.4], [0.6, 0.9]))
    assert out["eer"] == 0.0 and out["auroc"] == 1.0
    assert out["n_bona"] == 2 and out["n_spoof"] == 2
