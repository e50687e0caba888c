"""Report figures rendered straight to files (headless backend).

Two plots back the CLI's report paths: the bank's illuminants projected on
the a*b* chroma plane, and the ROC / precision-recall panel pair for
classification scores.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .color import LabPoint
from .metrics import auc, average_precision, pr_points, roc_points


def save_lab_scatter(points: Sequence[LabPoint], path, colors=None, title: str = "illuminants, a*b* plane") -> None:
    """Scatter Lab points on the a*b* plane.

    colors, when given, is one RGB triple in [0, 1] per point so each marker
    can show the chromaticity it stands for.
    """
    if len(points) == 0:
        raise ValueError("no points to plot")
    a = np.array([p.a for p in points])
    b = np.array([p.b for p in points])
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    ax.axhline(0.0, color="0.7", lw=0.8, zorder=0)
    ax.axvline(0.0, color="0.7", lw=0.8, zorder=0)
    ax.scatter(a, b, s=18, c=colors if colors is not None else "tab:blue",
               edgecolors="0.3", linewidths=0.3)
    ax.set_xlabel("a*")
    ax.set_ylabel("b*")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_classification_report(scores, path) -> None:
    """ROC and precision-recall panels for (score, label) pairs, with the
    summary statistics in the panel titles."""
    fpr, tpr = roc_points(scores)
    rec, prec = pr_points(scores)
    area = auc(scores)
    ap = average_precision(scores)

    fig, (ax_roc, ax_pr) = plt.subplots(1, 2, figsize=(10.0, 4.5))
    ax_roc.plot([0, 1], [0, 1], color="0.7", lw=0.8, ls="--")
    ax_roc.plot(fpr, tpr, color="tab:blue", lw=1.6)
    ax_roc.set_xlabel("false positive rate")
    ax_roc.set_ylabel("true positive rate")
    ax_roc.set_title(f"ROC (AUC = {area:.4f})")
    ax_roc.set_xlim(-0.02, 1.02)
    ax_roc.set_ylim(-0.02, 1.02)
    ax_roc.grid(alpha=0.3)

    ax_pr.plot(rec, prec, color="tab:orange", lw=1.6)
    ax_pr.set_xlabel("recall")
    ax_pr.set_ylabel("precision")
    ax_pr.set_title(f"precision-recall (AP = {ap:.4f})")
    ax_pr.set_xlim(-0.02, 1.02)
    ax_pr.set_ylim(-0.02, 1.02)
    ax_pr.grid(alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
