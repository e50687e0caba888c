"""Segmentation and classification metrics.

Segmentation metrics come from the pixel confusion counts of a predicted
binary mask against ground truth. Edge conventions, stated once here:

* dice and jaccard are 1.0 when both masks are empty (perfect agreement on
  nothing);
* sensitivity is undefined when the ground truth has no positive pixels,
  specificity when it has no negatives -- both raise DomainError instead of
  inventing a value;
* threshold_map marks a pixel positive when value >= t.

Classification: auc is the Mann-Whitney statistic (ties at half credit,
identical to the trapezoidal area under the ROC curve), average_precision
walks the descending-score ranking with ties kept in input order.
"""

from __future__ import annotations

import csv
import math
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import DomainError, ScoreFormatError

SCORE_CSV_HEADER = ("id", "score", "label")


def _as_mask(arr, name: str) -> np.ndarray:
    m = np.asarray(arr)
    if m.ndim != 2:
        raise ValueError(f"{name} must be a 2-D mask, got shape {m.shape}")
    return m.astype(bool)


def confusion_counts(pred, gt) -> tuple[int, int, int, int]:
    """Pixel counts (tp, fp, fn, tn) of a predicted mask against ground truth."""
    p = _as_mask(pred, "pred")
    g = _as_mask(gt, "gt")
    if p.shape != g.shape:
        raise ValueError(f"mask shapes differ: pred {p.shape} vs gt {g.shape}")
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    tn = int(np.count_nonzero(~p & ~g))
    return tp, fp, fn, tn


def accuracy(pred, gt) -> float:
    tp, fp, fn, tn = confusion_counts(pred, gt)
    return (tp + tn) / (tp + fp + fn + tn)


def dice(pred, gt) -> float:
    """Dice coefficient 2TP/(2TP+FP+FN); two empty masks agree perfectly."""
    tp, fp, fn, _ = confusion_counts(pred, gt)
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 1.0
    return 2 * tp / denom


def jaccard(pred, gt) -> float:
    """Jaccard index TP/(TP+FP+FN); two empty masks agree perfectly."""
    tp, fp, fn, _ = confusion_counts(pred, gt)
    denom = tp + fp + fn
    if denom == 0:
        return 1.0
    return tp / denom


def sensitivity(pred, gt) -> float:
    tp, _, fn, _ = confusion_counts(pred, gt)
    if tp + fn == 0:
        raise DomainError("sensitivity undefined: ground truth has no positive pixels")
    return tp / (tp + fn)


def specificity(pred, gt) -> float:
    _, fp, _, tn = confusion_counts(pred, gt)
    if tn + fp == 0:
        raise DomainError("specificity undefined: ground truth has no negative pixels")
    return tn / (tn + fp)


def seg_metrics(pred, gt) -> dict[str, float]:
    """All five segmentation metrics from one confusion computation.

    Raises DomainError when the ground truth is single-class, since then
    either sensitivity or specificity has an empty denominator.
    """
    tp, fp, fn, tn = confusion_counts(pred, gt)
    if tp + fn == 0:
        raise DomainError("sensitivity undefined: ground truth has no positive pixels")
    if tn + fp == 0:
        raise DomainError("specificity undefined: ground truth has no negative pixels")
    return {
        "accuracy": (tp + tn) / (tp + fp + fn + tn),
        "dice": 1.0 if 2 * tp + fp + fn == 0 else 2 * tp / (2 * tp + fp + fn),
        "jaccard": 1.0 if tp + fp + fn == 0 else tp / (tp + fp + fn),
        "sensitivity": tp / (tp + fn),
        "specificity": tn / (tn + fp),
    }


def threshold_map(prob_map, t: float = 0.5) -> np.ndarray:
    """Binarize a probability map; a pixel is positive when its value >= t."""
    p = np.asarray(prob_map, dtype=np.float64)
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("probability map has values outside [0, 1]")
    return p >= t


def _split_scores(scores: Iterable[tuple[float, bool]]) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(scores)
    if not pairs:
        raise DomainError("empty score list")
    s = np.array([float(p[0]) for p in pairs], dtype=np.float64)
    y = np.array([bool(p[1]) for p in pairs], dtype=bool)
    if not np.isfinite(s).all():
        raise ValueError("scores must be finite")
    return s, y


def auc(scores: Iterable[tuple[float, bool]]) -> float:
    """Probability that a random positive outscores a random negative.

    Mann-Whitney with midranks, so tied pairs count one half. Needs at
    least one example of each class.
    """
    s, y = _split_scores(scores)
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DomainError(f"AUC needs both classes, got {n_pos} positives and {n_neg} negatives")
    ranks = rankdata(s)  # average ranks resolve ties symmetrically
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def average_precision(scores: Iterable[tuple[float, bool]]) -> float:
    """Mean of precision-at-rank over the positives, ranked by descending
    score; equal scores keep their input order."""
    s, y = _split_scores(scores)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise DomainError("average precision needs at least one positive")
    order = np.argsort(-s, kind="stable")
    hits = y[order]
    ranks = np.arange(1, s.size + 1, dtype=np.float64)
    cum_hits = np.cumsum(hits)
    return float((cum_hits[hits] / ranks[hits]).sum() / n_pos)


def roc_points(scores: Iterable[tuple[float, bool]]) -> tuple[np.ndarray, np.ndarray]:
    """(fpr, tpr) vertices of the ROC curve, one per distinct score plus the
    origin. Trapezoidal area over these equals auc()."""
    s, y = _split_scores(scores)
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DomainError(f"ROC needs both classes, got {n_pos} positives and {n_neg} negatives")
    order = np.argsort(-s, kind="stable")
    ss, yy = s[order], y[order]
    # keep only the last index of each tie group: thresholds sweep distinct scores
    last = np.r_[np.nonzero(np.diff(ss))[0], ss.size - 1]
    tpr = np.r_[0.0, np.cumsum(yy)[last] / n_pos]
    fpr = np.r_[0.0, np.cumsum(~yy)[last] / n_neg]
    return fpr, tpr


def pr_points(scores: Iterable[tuple[float, bool]]) -> tuple[np.ndarray, np.ndarray]:
    """(recall, precision) walked over the descending-score ranking, one
    vertex per rank, starting at (0, 1)."""
    s, y = _split_scores(scores)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise DomainError("PR curve needs at least one positive")
    order = np.argsort(-s, kind="stable")
    hits = y[order]
    ranks = np.arange(1, s.size + 1, dtype=np.float64)
    cum_hits = np.cumsum(hits)
    recall = np.r_[0.0, cum_hits / n_pos]
    precision = np.r_[1.0, cum_hits / ranks]
    return recall, precision


def read_score_csv(path) -> list[tuple[float, bool]]:
    """Parse a `id,score,label` CSV into (score, label) pairs in file order.

    Scores must be finite reals in [0, 1]; labels must be 0 or 1. Any
    deviation raises ScoreFormatError naming the offending line.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ScoreFormatError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != SCORE_CSV_HEADER:
            raise ScoreFormatError(
                f"{path}: expected header {','.join(SCORE_CSV_HEADER)!r}, got {','.join(header)!r}"
            )
        out: list[tuple[float, bool]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ScoreFormatError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                score = float(row[1])
            except ValueError:
                raise ScoreFormatError(f"{path}:{lineno}: bad score {row[1]!r}") from None
            if not math.isfinite(score) or not 0.0 <= score <= 1.0:
                raise ScoreFormatError(f"{path}:{lineno}: score {score} outside [0, 1]")
            label = row[2].strip()
            if label not in ("0", "1"):
                raise ScoreFormatError(f"{path}:{lineno}: label must be 0 or 1, got {row[2]!r}")
            out.append((score, label == "1"))
    if not out:
        raise ScoreFormatError(f"{path}: no data rows")
    return out
