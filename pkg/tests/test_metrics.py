import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowsift import (
    ConfusionMatrix,
    Label,
    MetricError,
    average_precision,
    classify,
    evaluate_scores,
    f1,
    pr_curve,
    precision,
    prevalence,
    recall,
    roc_auc,
    roc_curve,
    threshold_sweep,
)

from reference_impl import brute_force_ap, concordance_roc_auc


def scores_labels(n_min=4, n_max=200):
    """Random score/label instances that always contain both classes."""
    return st.integers(min_value=0, max_value=2**31).map(_make_instance(n_min, n_max))


def _make_instance(n_min, n_max):
    def build(seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(n_min, n_max + 1))
        # coarse grid scores so threshold ties actually occur
        scores = rng.integers(0, 12, n) / 11.0
        labels = rng.integers(0, 2, n).astype(np.int8)
        labels[0] = 1
        labels[1] = 0
        return scores, labels

    return build


class TestClassify:
    def test_inclusive_boundary(self):
        assert classify(0.5, 0.5) is Label.BOTNET

    def test_below(self):
        assert classify(0.49, 0.5) is Label.BENIGN


class TestConfusionAndRates:
    def test_table_mirror_row(self):
        cm = ConfusionMatrix(tp=652, fp=348, tn=9000, fn=1173)
        assert precision(cm) == pytest.approx(0.652)

    def test_degenerate_conventions(self):
        cm = ConfusionMatrix(tp=0, fp=0, tn=10, fn=5)
        assert precision(cm) == 0.0
        assert recall(cm) == 0.0
        assert f1(cm) == 0.0

    def test_hand_arithmetic(self):
        cm = ConfusionMatrix(tp=3, fp=3, tn=0, fn=2)
        assert precision(cm) == 0.5
        assert recall(cm) == pytest.approx(0.6)
        assert f1(cm) == pytest.approx(6 / 11)

    def test_from_scores_counts(self):
        cm = ConfusionMatrix.from_scores(
            [0.9, 0.4, 0.6, 0.1], [1, 1, 0, 0], threshold=0.5
        )
        assert (cm.tp, cm.fp, cm.tn, cm.fn) == (1, 1, 1, 1)
        assert cm.total == 4


class TestPRCurve:
    def test_perfect_ranking(self):
        assert average_precision([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0

    def test_worked_example(self):
        ap = average_precision([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
        assert ap == pytest.approx(1 * 0.5 + (2 / 3) * 0.5, abs=1e-12)

    def test_single_class_errors(self):
        with pytest.raises(MetricError):
            pr_curve([0.5, 0.6], [1, 1])

    def test_curve_shape_invariants(self):
        c = pr_curve([0.9, 0.8, 0.8, 0.1], [1, 0, 1, 0])
        assert np.all(np.diff(c.thresholds) < 0)  # strictly decreasing
        assert c.x[0] == 0.0 and c.y[0] == 1.0  # anchor
        assert c.x[-1] == 1.0  # recall reaches 1
        assert 0.0 < c.area <= 1.0

    def test_ties_form_one_step(self):
        c = pr_curve([0.5, 0.5, 0.5, 0.1], [1, 0, 1, 0])
        assert c.thresholds.size == 3  # inf anchor + two distinct scores


class TestROCCurve:
    def test_perfect(self):
        assert roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0

    def test_reversed(self):
        assert roc_auc([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]) == 0.0

    def test_worked_example(self):
        assert roc_auc([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0]) == pytest.approx(0.75)

    def test_fpr_non_decreasing(self):
        rng = np.random.default_rng(2)
        s = rng.random(50)
        y = rng.integers(0, 2, 50)
        y[:2] = [0, 1]
        c = roc_curve(s, y)
        assert np.all(np.diff(c.x) >= 0)


class TestOracleProperties:
    @given(scores_labels())
    @settings(max_examples=80, deadline=None)
    def test_ap_equals_brute_force(self, instance):
        scores, labels = instance
        assert average_precision(scores, labels) == pytest.approx(
            brute_force_ap(scores, labels), abs=1e-9
        )

    @given(scores_labels())
    @settings(max_examples=80, deadline=None)
    def test_roc_equals_concordance(self, instance):
        scores, labels = instance
        assert roc_auc(scores, labels) == pytest.approx(
            concordance_roc_auc(scores, labels), abs=1e-9
        )

    @given(scores_labels())
    @settings(max_examples=40, deadline=None)
    def test_score_order_invariance(self, instance):
        scores, labels = instance
        transformed = np.exp(2.0 * scores) + 0.1 * scores  # strictly increasing
        assert average_precision(transformed, labels) == average_precision(scores, labels)
        assert roc_auc(transformed, labels) == roc_auc(scores, labels)
        a = threshold_sweep(scores, labels)
        b = threshold_sweep(transformed, labels)
        assert np.array_equal(a.precisions, b.precisions)
        assert np.array_equal(a.recalls, b.recalls)


class TestSweep:
    def test_perfect_best_at_lowest_positive(self):
        sweep = threshold_sweep([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
        assert sweep.best.f1 == 1.0
        assert sweep.best.threshold == 0.8

    def test_worked_example(self):
        sweep = threshold_sweep([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
        assert sweep.best.threshold == pytest.approx(0.7)
        assert sweep.best.f1 == pytest.approx(0.8)

    def test_tie_breaks_toward_higher_threshold(self):
        # F1 at T=0.9 equals F1 at T=0.3 by symmetry; higher T must win
        scores = [0.9, 0.3]
        labels = [1, 0]
        sweep = threshold_sweep(scores, labels)
        assert sweep.best.f1 == 1.0
        assert sweep.best.threshold == 0.9

    @given(scores_labels())
    @settings(max_examples=60, deadline=None)
    def test_best_at_least_default(self, instance):
        scores, labels = instance
        report = evaluate_scores(scores, labels)
        assert report.at_tuned.f1 >= report.at_default.f1 - 1e-12

    @given(scores_labels())
    @settings(max_examples=40, deadline=None)
    def test_monotone_threshold_property(self, instance):
        scores, labels = instance
        scores = np.asarray(scores)
        labels = np.asarray(labels)
        prev_recall, prev_fp = np.inf, np.inf
        for t in np.sort(np.unique(scores)):  # ascending thresholds
            cm = ConfusionMatrix.from_scores(scores, labels, t)
            assert recall(cm) <= prev_recall
            assert cm.fp <= prev_fp
            prev_recall, prev_fp = recall(cm), cm.fp


class TestEvalReport:
    def test_report_fields(self):
        scores = [0.9, 0.8, 0.7, 0.2, 0.1]
        labels = [1, 0, 1, 0, 0]
        report = evaluate_scores(scores, labels)
        d = report.as_dict()
        assert set(d) == {"roc_auc", "pr_auc", "prevalence", "at_default", "at_tuned"}
        assert d["prevalence"] == prevalence(labels) == 0.4
        assert d["at_default"]["threshold"] == 0.5

    def test_random_baseline_smoke(self):
        rng = np.random.default_rng(0)
        n = 20000
        scores = rng.random(n)
        labels = (rng.random(n) < 0.05).astype(np.int8)
        assert average_precision(scores, labels) == pytest.approx(0.05, abs=0.01)


class TestCurveCsv:
    def test_csv_written_with_named_columns(self, tmp_path):
        c = pr_curve([0.9, 0.4, 0.2], [1, 0, 1])
        path = tmp_path / "pr.csv"
        c.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "threshold,recall,precision"
        assert lines[1].startswith("inf,")
        assert len(lines) == 1 + c.thresholds.size
