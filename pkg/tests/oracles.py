"""Independent oracles the test suite checks the library against.

Each function recomputes an expected result by a route the library does not
use: explicit loops, pairwise counting, index permutations, per-pixel sorts.
None of them import the package under test.
"""

import math

import numpy as np


def gray_world_direction(data):
    """Unit-normalized per-channel arithmetic means of an (H, W, 3) array."""
    means = [float(np.mean(data[:, :, c])) for c in range(3)]
    norm = math.sqrt(sum(m * m for m in means))
    return np.array([m / norm for m in means])


def max_rgb_direction(data):
    """Unit-normalized per-channel maxima of an (H, W, 3) array."""
    tops = [float(np.max(data[:, :, c])) for c in range(3)]
    norm = math.sqrt(sum(m * m for m in tops))
    return np.array([m / norm for m in tops])


def angular_degrees(u, v):
    dot = float(np.dot(u, v)) / (float(np.linalg.norm(u)) * float(np.linalg.norm(v)))
    return math.degrees(math.acos(min(1.0, max(-1.0, dot))))


def confusion_by_loops(pred, gt):
    """(tp, tn, fp, fn) counted pixel by pixel in Python."""
    tp = tn = fp = fn = 0
    for p, g in zip(pred.ravel().tolist(), gt.ravel().tolist()):
        if p and g:
            tp += 1
        elif not p and not g:
            tn += 1
        elif p and not g:
            fp += 1
        else:
            fn += 1
    return tp, tn, fp, fn


def seg_metrics_by_loops(pred, gt):
    tp, tn, fp, fn = confusion_by_loops(pred, gt)
    total = tp + tn + fp + fn
    return {
        "accuracy": (tp + tn) / total,
        "dice": 1.0 if tp + fp + fn == 0 else 2 * tp / (2 * tp + fp + fn),
        "jaccard": 1.0 if tp + fp + fn == 0 else tp / (tp + fp + fn),
        "sensitivity": tp / (tp + fn),
        "specificity": tn / (tn + fp),
    }


def auc_by_pairwise_counting(pairs):
    """P(random positive outscores random negative), ties counted 1/2."""
    pos = [s for s, y in pairs if y]
    neg = [s for s, y in pairs if not y]
    total = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                total += 1.0
            elif sp == sn:
                total += 0.5
    return total / (len(pos) * len(neg))


def median_by_sorting(stack):
    """Per-pixel median of a (k, H, W) stack via explicit sorts.

    Even k averages the two middle values.
    """
    k, h, w = stack.shape
    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            vals = sorted(stack[:, i, j].tolist())
            if k % 2 == 1:
                out[i, j] = vals[k // 2]
            else:
                out[i, j] = (vals[k // 2 - 1] + vals[k // 2]) / 2.0
    return out


def rotate90_ccw(arr):
    """Exact 90 degree counterclockwise-on-screen rotation of a square image.

    Derived from the point map (x, y) -> (cx + (y - cy), cy - (x - cx)) in
    row-0-on-top screen coordinates: out[i, j] = in[j, n-1-i], which is
    np.rot90 with k=1.
    """
    n = arr.shape[0]
    assert arr.shape[1] == n
    out = np.empty_like(arr)
    for i in range(n):
        for j in range(n):
            out[i, j] = arr[j, n - 1 - i]
    return out


def tight_bbox_by_scan(mask):
    """(top, bottom, left, right) inclusive, by scanning every pixel."""
    top, bottom, left, right = None, None, None, None
    h, w = mask.shape
    for i in range(h):
        for j in range(w):
            if mask[i, j]:
                top = i if top is None else min(top, i)
                bottom = i if bottom is None else max(bottom, i)
                left = j if left is None else min(left, j)
                right = j if right is None else max(right, j)
    return top, bottom, left, right
