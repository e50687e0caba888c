"""Segmentation and classification metrics against independent counting
oracles, plus the score CSV reader."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from illumaug import (
    DomainError,
    ScoreFormatError,
    accuracy,
    auc,
    average_precision,
    confusion_counts,
    dice,
    jaccard,
    read_score_csv,
    seg_metrics,
    sensitivity,
    specificity,
    threshold_map,
)
from illumaug.metrics import pr_points, roc_points


def masks_from_counts(tp, fp, fn, tn):
    """Lay out a 1-row mask pair realizing exact confusion counts."""
    total = tp + fp + fn + tn
    pred = np.zeros((1, total), bool)
    gt = np.zeros((1, total), bool)
    pred[0, : tp + fp] = True
    gt[0, :tp] = True
    gt[0, tp + fp : tp + fp + fn] = True
    return pred, gt


class TestSegMetrics:
    def test_identical_masks_score_one_everywhere(self, rng):
        m = rng.random((12, 12)) < 0.4
        m[0, 0] = True
        m[1, 1] = False
        out = seg_metrics(m, m)
        assert set(out) == {"accuracy", "dice", "jaccard", "sensitivity", "specificity"}
        assert all(v == 1.0 for v in out.values())

    def test_disjoint_masks_have_zero_overlap_scores(self):
        pred = np.zeros((4, 4), bool)
        gt = np.zeros((4, 4), bool)
        pred[0, :] = True
        gt[2, :] = True
        out = seg_metrics(pred, gt)
        assert out["dice"] == 0.0 and out["jaccard"] == 0.0

    def test_worked_confusion_example(self):
        pred, gt = masks_from_counts(tp=2, fp=2, fn=2, tn=10)
        assert confusion_counts(pred, gt) == (2, 2, 2, 10)
        out = seg_metrics(pred, gt)
        assert out["dice"] == 0.5
        assert out["jaccard"] == 1 / 3
        assert out["accuracy"] == 12 / 16
        assert out["sensitivity"] == 0.5
        assert out["specificity"] == 10 / 12

    def test_matches_loop_oracle_on_random_pairs(self, rng):
        for _ in range(100):
            pred = rng.random((16, 16)) < rng.uniform(0.2, 0.8)
            gt = rng.random((16, 16)) < rng.uniform(0.2, 0.8)
            gt[0, 0] = True
            gt[0, 1] = False
            assert seg_metrics(pred, gt) == oracles.seg_metrics_by_loops(pred, gt)

    def test_single_class_ground_truth_is_an_error(self):
        pred = np.zeros((3, 3), bool)
        with pytest.raises(DomainError, match="sensitivity"):
            seg_metrics(pred, np.zeros((3, 3), bool))
        with pytest.raises(DomainError, match="specificity"):
            seg_metrics(pred, np.ones((3, 3), bool))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            seg_metrics(np.zeros((2, 3), bool), np.zeros((3, 2), bool))

    def test_standalone_dice_jaccard_on_two_empty_masks(self):
        empty = np.zeros((5, 5), bool)
        assert dice(empty, empty) == 1.0
        assert jaccard(empty, empty) == 1.0
        assert accuracy(empty, empty) == 1.0

    def test_standalone_sensitivity_specificity_errors(self):
        empty = np.zeros((5, 5), bool)
        full = np.ones((5, 5), bool)
        with pytest.raises(DomainError):
            sensitivity(empty, empty)
        with pytest.raises(DomainError):
            specificity(full, full)
        assert sensitivity(full, full) == 1.0
        assert specificity(empty, empty) == 1.0

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**9))
    def test_dice_dominates_jaccard(self, seed):
        r = np.random.default_rng(seed)
        pred = r.random((8, 8)) < r.uniform(0.1, 0.9)
        gt = r.random((8, 8)) < r.uniform(0.1, 0.9)
        d, j = dice(pred, gt), jaccard(pred, gt)
        assert 0.0 <= j <= d <= 1.0
        if d in (0.0, 1.0):
            assert j == d
        else:
            assert j < d


class TestThresholdMap:
    def test_value_at_threshold_counts_as_positive(self):
        out = threshold_map(np.array([[0.5]]), 0.5)
        assert out[0, 0]

    def test_mixed_values(self):
        out = threshold_map(np.array([[0.2, 0.7]]), 0.5)
        assert out.tolist() == [[False, True]]

    def test_all_zero_map_is_empty(self):
        assert not threshold_map(np.zeros((4, 4))).any()

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            threshold_map(np.array([[1.2]]))


class TestAuc:
    def test_perfect_separation(self):
        scores = [(0.9, True), (0.8, True), (0.3, False), (0.2, False)]
        assert auc(scores) == 1.0

    def test_three_of_four_pairs_ordered(self):
        scores = [(0.9, True), (0.8, False), (0.3, True), (0.2, False)]
        assert auc(scores) == 0.75

    def test_all_tied_scores_give_half(self):
        assert auc([(0.5, True), (0.5, False)]) == 0.5

    def test_single_class_rejected(self):
        with pytest.raises(DomainError):
            auc([(0.5, True), (0.6, True)])
        with pytest.raises(DomainError):
            auc([(0.5, False)])

    def test_matches_pairwise_oracle(self, rng):
        for _ in range(60):
            n = int(rng.integers(2, 60))
            scores = list(np.round(rng.uniform(0, 1, n), 2))  # coarse grid forces ties
            labels = rng.random(n) < 0.5
            labels[0], labels[1] = True, False
            pairs = list(zip(scores, labels))
            assert auc(pairs) == pytest.approx(oracles.auc_by_pairwise_counting(pairs), abs=1e-12)

    def test_invariant_under_monotone_transform(self, rng):
        n = 40
        scores = rng.uniform(0, 1, n)
        labels = rng.random(n) < 0.5
        labels[:2] = [True, False]
        base = auc(list(zip(scores, labels)))
        cubed = auc(list(zip(scores**3, labels)))
        assert base == cubed

    def test_label_flip_complements_when_no_ties(self, rng):
        scores = rng.permutation(np.linspace(0.01, 0.99, 30))
        labels = rng.random(30) < 0.5
        labels[:2] = [True, False]
        a = auc(list(zip(scores, labels)))
        b = auc(list(zip(scores, ~labels)))
        assert a + b == pytest.approx(1.0, abs=1e-12)


class TestAveragePrecision:
    def test_all_positives_ranked_first(self):
        scores = [(0.9, True), (0.8, True), (0.3, False)]
        assert average_precision(scores) == 1.0

    def test_single_positive_at_second_rank(self):
        assert average_precision([(0.9, False), (0.8, True)]) == 0.5

    def test_lone_positive(self):
        assert average_precision([(0.42, True)]) == 1.0

    def test_no_positives_rejected(self):
        with pytest.raises(DomainError):
            average_precision([(0.4, False)])

    def test_ties_keep_input_order(self):
        assert average_precision([(0.5, True), (0.5, False)]) == 1.0
        assert average_precision([(0.5, False), (0.5, True)]) == 0.5

    def test_rank_walk_on_interleaved_labels(self):
        scores = [(0.9, True), (0.8, False), (0.7, True), (0.6, False)]
        assert average_precision(scores) == pytest.approx((1.0 + 2 / 3) / 2, abs=1e-15)


class TestCurvePoints:
    def test_roc_trapezoid_area_equals_auc(self, rng):
        for _ in range(20):
            n = int(rng.integers(4, 80))
            scores = np.round(rng.uniform(0, 1, n), 2)
            labels = rng.random(n) < 0.5
            labels[0], labels[1] = True, False
            pairs = list(zip(scores, labels))
            fpr, tpr = roc_points(pairs)
            assert np.trapezoid(tpr, fpr) == pytest.approx(auc(pairs), abs=1e-12)

    def test_roc_endpoints(self, rng):
        pairs = [(0.8, True), (0.4, False), (0.6, True)]
        fpr, tpr = roc_points(pairs)
        assert fpr[0] == 0.0 and tpr[0] == 0.0
        assert fpr[-1] == 1.0 and tpr[-1] == 1.0

    def test_pr_starts_at_full_precision(self):
        rec, prec = pr_points([(0.8, True), (0.4, False)])
        assert rec[0] == 0.0 and prec[0] == 1.0
        assert rec[-1] == 1.0


class TestScoreCsv:
    def _write(self, tmp_path, text):
        p = tmp_path / "scores.csv"
        p.write_text(text, encoding="utf-8")
        return p

    def test_reads_rows_in_order(self, tmp_path):
        p = self._write(tmp_path, "id,score,label\na,0.9,1\nb,0.3,0\n")
        assert read_score_csv(p) == [(0.9, True), (0.3, False)]

    def test_bad_header_rejected(self, tmp_path):
        p = self._write(tmp_path, "image,prob,cls\na,0.9,1\n")
        with pytest.raises(ScoreFormatError, match="header"):
            read_score_csv(p)

    def test_bad_score_names_the_line(self, tmp_path):
        p = self._write(tmp_path, "id,score,label\na,0.9,1\nb,oops,0\n")
        with pytest.raises(ScoreFormatError, match="3"):
            read_score_csv(p)

    def test_out_of_range_score_rejected(self, tmp_path):
        p = self._write(tmp_path, "id,score,label\na,1.5,1\n")
        with pytest.raises(ScoreFormatError):
            read_score_csv(p)

    def test_bad_label_rejected(self, tmp_path):
        p = self._write(tmp_path, "id,score,label\na,0.5,yes\n")
        with pytest.raises(ScoreFormatError, match="label"):
            read_score_csv(p)

    def test_missing_field_rejected(self, tmp_path):
        p = self._write(tmp_path, "id,score,label\na,0.5\n")
        with pytest.raises(ScoreFormatError):
            read_score_csv(p)

    def test_empty_data_rejected(self, tmp_path):
        p = self._write(tmp_path, "id,score,label\n")
        with pytest.raises(ScoreFormatError):
            read_score_csv(p)
