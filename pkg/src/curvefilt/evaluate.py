"""ROC/AUC scoring against ground truth, mean-ROC averaging, profiles,
and junction uniformity metrics."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from .image import Image
from .mfat import ResponseMap
from .phantom import Phantom


@dataclass(frozen=True)
class RocCurve:
    """Threshold sweep of (threshold, FPR, TPR) points plus trapezoidal AUC.

    Ties count as half-correct (Mann-Whitney convention), so a constant
    response scores exactly 0.5.
    """

    points: tuple  # of (threshold, fpr, tpr)
    auc: float
    n_pos: int
    n_neg: int


def _as_array(x):
    if isinstance(x, ResponseMap):
        return x.values
    if isinstance(x, Image):
        return x.data
    return np.asarray(x, dtype=np.float64)


def roc(response, gt, mask=None) -> RocCurve:
    """Exact ROC sweep over all distinct response values.

    gt is binary (nonzero = structure); mask, when given, restricts the
    evaluated voxels. AUC is trapezoidal and equals the rank-sum statistic.
    """
    scores = _as_array(response).ravel()
    labels = _as_array(gt).ravel() != 0
    if scores.shape != labels.shape:
        raise ValueError("response and ground truth must share dims")
    if mask is not None:
        keep = _as_array(mask).ravel() != 0
        scores, labels = scores[keep], labels[keep]
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative voxel")
    order = np.argsort(-scores, kind="stable")
    scores = scores[order]
    labels = labels[order]
    tp = np.cumsum(labels)
    fp = np.cumsum(~labels)
    # collapse ties: keep the last index of each distinct score
    last = np.r_[scores[1:] != scores[:-1], True]
    thresholds = np.r_[np.inf, scores[last]]
    tpr = np.r_[0.0, tp[last] / n_pos]
    fpr = np.r_[0.0, fp[last] / n_neg]
    auc = float(np.trapezoid(tpr, fpr))
    points = tuple(zip(thresholds.tolist(), fpr.tolist(), tpr.tolist()))
    return RocCurve(points=points, auc=auc, n_pos=n_pos, n_neg=n_neg)


def mean_roc(curves, n_grid=1001):
    """Vertical averaging: mean TPR at a fixed FPR grid across curves.

    Returns (fpr_grid, mean_tpr).
    """
    curves = list(curves)
    if not curves:
        raise ValueError("need at least one curve")
    grid = np.linspace(0.0, 1.0, n_grid)
    tprs = []
    for c in curves:
        fpr = np.array([p[1] for p in c.points])
        tpr = np.array([p[2] for p in c.points])
        tprs.append(np.interp(grid, fpr, tpr))
    return grid, np.mean(tprs, axis=0)


def write_roc_csv(curve: RocCurve, path):
    """One row per ROC point (threshold,fpr,tpr) and a summary AUC row."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["threshold", "fpr", "tpr"])
        for t, fpr, tpr in curve.points:
            w.writerow([repr(t), repr(fpr), repr(tpr)])
        w.writerow(["auc", repr(curve.auc), ""])


def profile(response, start, end, n_samples):
    """Evenly spaced bilinear/trilinear samples along a segment."""
    arr = _as_array(response)
    start = np.asarray(start, dtype=np.float64)
    end = np.asarray(end, dtype=np.float64)
    if start.shape != (arr.ndim,) or end.shape != (arr.ndim,):
        raise ValueError("endpoints must match image rank")
    upper = np.array(arr.shape, dtype=np.float64) - 1.0
    for pt in (start, end):
        if np.any(pt < 0) or np.any(pt > upper):
            raise ValueError(f"endpoint {pt.tolist()} outside image")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    t = np.linspace(0.0, 1.0, n_samples)
    coords = start[:, None] + (end - start)[:, None] * t
    return map_coordinates(arr, coords, order=1, mode="nearest")


def junction_metrics(response, phantom: Phantom):
    """Uniformity metrics at a junction phantom.

    Returns (junction_ratio, centerline_cv): the junction response relative
    to the median centerline response, and std/mean over the centerline.
    """
    arr = _as_array(response)
    cl = phantom.centerline.data > 0
    if not cl.any():
        raise ValueError("phantom has an empty centerline")
    junctions = phantom.descriptor.get("junction_voxels", [])
    cl_vals = arr[cl]
    median = float(np.median(cl_vals))
    mean = float(cl_vals.mean())
    cv = float(cl_vals.std() / mean) if mean != 0 else np.inf
    if junctions:
        j_val = float(np.mean([arr[tuple(v)] for v in junctions]))
        ratio = j_val / median if median != 0 else np.inf
    else:
        ratio = np.nan
    return ratio, cv
