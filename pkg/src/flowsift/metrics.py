"""Imbalance-aware evaluation: confusion counts, PR/ROC curves, sweeps.

PR area is average precision (step integration over descending score
thresholds), matching the random-classifier baseline equal to the positive
prevalence. ROC area uses the trapezoidal rule and equals the ranking
concordance probability. The decision rule is inclusive everywhere: a flow
is flagged when its score >= threshold.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .errors import MetricError
from .flows import Label


def classify(score: float, threshold: float) -> Label:
    """Inclusive decision rule: Botnet iff score >= threshold."""
    return Label.BOTNET if score >= threshold else Label.BENIGN


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @classmethod
    def from_scores(cls, scores, labels, threshold: float) -> "ConfusionMatrix":
        scores = np.asarray(scores, np.float64)
        labels = np.asarray(labels)
        pred = scores >= threshold
        pos = labels == 1
        return cls(
            tp=int(np.sum(pred & pos)),
            fp=int(np.sum(pred & ~pos)),
            tn=int(np.sum(~pred & ~pos)),
            fn=int(np.sum(~pred & pos)),
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def precision(cm: ConfusionMatrix) -> float:
    """TP / (TP + FP); 0 when nothing is predicted positive."""
    denom = cm.tp + cm.fp
    return cm.tp / denom if denom else 0.0


def recall(cm: ConfusionMatrix) -> float:
    """TP / (TP + FN); 0 when there are no positives."""
    denom = cm.tp + cm.fn
    return cm.tp / denom if denom else 0.0


def f1(cm: ConfusionMatrix) -> float:
    """Harmonic mean of precision and recall; 0 when both vanish."""
    p = precision(cm)
    r = recall(cm)
    return 2.0 * p * r / (p + r) if p + r else 0.0


@dataclass(frozen=True)
class Curve:
    """Operating-curve points at strictly decreasing thresholds.

    The first point is an anchor at threshold +inf (recall 0 for PR;
    origin for ROC); the last threshold is the minimum score, where every
    example is predicted positive.
    """

    thresholds: np.ndarray
    x: np.ndarray
    y: np.ndarray
    area: float
    x_name: str
    y_name: str

    def to_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold", self.x_name, self.y_name])
            for t, xv, yv in zip(self.thresholds, self.x, self.y):
                writer.writerow([repr(float(t)), repr(float(xv)), repr(float(yv))])


def _ranked_counts(scores, labels):
    """Distinct descending thresholds with cumulative tp/predicted counts."""
    scores = np.asarray(scores, np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1 or scores.size == 0:
        raise MetricError("scores and labels must be equal-length 1-D arrays")
    if not np.isfinite(scores).all():
        raise MetricError("scores must be finite")
    n_pos = int(np.sum(labels == 1))
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("metrics need at least one example of each class")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    l = (labels[order] == 1).astype(np.int64)
    # last index of each tie block of equal scores
    boundary = np.flatnonzero(np.diff(s) != 0.0)
    ends = np.concatenate([boundary, [s.size - 1]])
    tp = np.cumsum(l)[ends]
    k = ends + 1  # predicted-positive count at each threshold
    return s[ends], tp, k, n_pos, n_neg


def pr_curve(scores, labels) -> Curve:
    """Precision-recall curve; area is average precision (step integration)."""
    thr, tp, k, n_pos, _ = _ranked_counts(scores, labels)
    prec = tp / k
    rec = tp / n_pos
    area = float(np.sum(np.diff(np.concatenate([[0.0], rec])) * prec))
    return Curve(
        thresholds=np.concatenate([[np.inf], thr]),
        x=np.concatenate([[0.0], rec]),
        y=np.concatenate([[1.0], prec]),
        area=area,
        x_name="recall",
        y_name="precision",
    )


def average_precision(scores, labels) -> float:
    return pr_curve(scores, labels).area


def roc_curve(scores, labels) -> Curve:
    """ROC curve; area by the trapezoidal rule (ties form one step)."""
    thr, tp, k, n_pos, n_neg = _ranked_counts(scores, labels)
    tpr = np.concatenate([[0.0], tp / n_pos])
    fpr = np.concatenate([[0.0], (k - tp) / n_neg])
    area = float(np.trapezoid(tpr, fpr))
    return Curve(
        thresholds=np.concatenate([[np.inf], thr]),
        x=fpr,
        y=tpr,
        area=area,
        x_name="fpr",
        y_name="tpr",
    )


def roc_auc(scores, labels) -> float:
    return roc_curve(scores, labels).area


@dataclass(frozen=True)
class OperatingPoint:
    threshold: float
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


@dataclass(frozen=True)
class SweepResult:
    """F1 evaluated at every achievable threshold, plus the best point.

    F1 ties break toward the higher threshold (fewer alerts at equal F1).
    """

    best: OperatingPoint
    thresholds: np.ndarray
    precisions: np.ndarray
    recalls: np.ndarray
    f1s: np.ndarray

    def to_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold", "precision", "recall", "f1"])
            for t, p, r, f in zip(self.thresholds, self.precisions,
                                  self.recalls, self.f1s):
                writer.writerow([repr(float(t)), repr(float(p)),
                                 repr(float(r)), repr(float(f))])


def threshold_sweep(scores, labels) -> SweepResult:
    """Exact best-F1 search over every distinct score as candidate T."""
    thr, tp, k, n_pos, _ = _ranked_counts(scores, labels)
    prec = tp / k
    rec = tp / n_pos
    denom = prec + rec
    f1s = np.where(denom > 0, 2.0 * prec * rec / np.where(denom > 0, denom, 1.0), 0.0)
    best_i = 0
    for i in range(1, f1s.size):
        if f1s[i] > f1s[best_i]:  # strict: earlier (higher) T wins ties
            best_i = i
    best = OperatingPoint(
        threshold=float(thr[best_i]),
        precision=float(prec[best_i]),
        recall=float(rec[best_i]),
        f1=float(f1s[best_i]),
    )
    return SweepResult(best=best, thresholds=thr, precisions=prec,
                       recalls=rec, f1s=f1s)


def prevalence(labels) -> float:
    labels = np.asarray(labels)
    return float(np.mean(labels == 1))


@dataclass(frozen=True)
class EvalReport:
    roc_auc: float
    pr_auc: float
    prevalence: float
    at_default: OperatingPoint
    at_tuned: OperatingPoint

    def as_dict(self) -> dict:
        return {
            "roc_auc": self.roc_auc,
            "pr_auc": self.pr_auc,
            "prevalence": self.prevalence,
            "at_default": self.at_default.as_dict(),
            "at_tuned": self.at_tuned.as_dict(),
        }


def evaluate_scores(scores, labels, default_threshold: float = 0.5) -> EvalReport:
    """Assemble the headline report: areas plus default and tuned rows."""
    cm = ConfusionMatrix.from_scores(scores, labels, default_threshold)
    sweep = threshold_sweep(scores, labels)
    return EvalReport(
        roc_auc=roc_auc(scores, labels),
        pr_auc=average_precision(scores, labels),
        prevalence=prevalence(labels),
        at_default=OperatingPoint(
            threshold=default_threshold,
            precision=precision(cm),
            recall=recall(cm),
            f1=f1(cm),
        ),
        at_tuned=sweep.best,
    )
