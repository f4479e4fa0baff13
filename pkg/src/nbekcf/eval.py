"""Tracking accuracy metrics against ground-truth boxes.

Conventions (fixed so results are bit-stable):

* precision counts frames with centre error ``<= t`` for ``t = 0, 1, ..., 50`` px;
* success counts frames with IoU ``> t`` for ``t = 0, 0.05, ..., 1`` (21 samples);
* ``auc`` is the mean of the 21 success samples. The sample at ``t = 1`` is
  always 0 under the strict comparison, so perfect tracking scores 20/21.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import BoundingBox

PRECISION_THRESHOLDS = np.arange(51, dtype=np.float64)
SUCCESS_THRESHOLDS = np.arange(21) / 20.0
DISTANCE_THRESHOLD = 20.0
OVERLAP_THRESHOLD = 0.5


@dataclass(frozen=True)
class TrackingMetrics:
    mean_center_error: float
    distance_precision: float
    precision_curve: list
    mean_overlap: float
    overlap_precision: float
    success_curve: list
    auc: float

    def as_dict(self) -> dict:
        return asdict(self)


def center_error(a: BoundingBox, b: BoundingBox) -> float:
    ax, ay = a.center
    bx, by = b.center
    return float(np.hypot(ax - bx, ay - by))


def overlap_ratio(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes."""
    # (x + w) - x can exceed w by an ulp; cap the overlap by the box extents
    iw = min(min(a.x + a.w, b.x + b.w) - max(a.x, b.x), a.w, b.w)
    ih = min(min(a.y + a.h, b.y + b.h) - max(a.y, b.y), a.h, b.h)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return float(min(inter / (a.w * a.h + b.w * b.h - inter), 1.0))


def precision_curve(errors, thresholds=PRECISION_THRESHOLDS) -> np.ndarray:
    e = np.asarray(errors, dtype=np.float64)
    return (e[None, :] <= np.asarray(thresholds)[:, None]).mean(axis=1)


def success_curve(overlaps, thresholds=SUCCESS_THRESHOLDS) -> np.ndarray:
    o = np.asarray(overlaps, dtype=np.float64)
    return (o[None, :] > np.asarray(thresholds)[:, None]).mean(axis=1)


def summarize(pred, gt) -> TrackingMetrics:
    pred, gt = list(pred), list(gt)
    if len(pred) != len(gt):
        raise ValueError(f"length mismatch: {len(pred)} predictions, {len(gt)} ground-truth boxes")
    if not pred:
        raise ValueError("need at least one frame")
    errors = np.array([center_error(p, g) for p, g in zip(pred, gt)])
    overlaps = np.array([overlap_ratio(p, g) for p, g in zip(pred, gt)])
    succ = success_curve(overlaps)
    return TrackingMetrics(
        mean_center_error=float(errors.mean()),
        distance_precision=float(np.mean(errors <= DISTANCE_THRESHOLD)),
        precision_curve=[float(v) for v in precision_curve(errors)],
        mean_overlap=float(overlaps.mean()),
        overlap_precision=float(np.mean(overlaps > OVERLAP_THRESHOLD)),
        success_curve=[float(v) for v in succ],
        auc=float(succ.mean()),
    )
