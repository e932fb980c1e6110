"""Evaluation metrics for localization and saliency output.

Box overlap uses inclusive pixel extents: a box covers
(x_max - x_min + 1) * (y_max - y_min + 1) pixels. Localization on an
image counts as correct only when some predicted box overlaps some
reference box with IoU strictly above 0.5.

The F-measure sweep runs on a value histogram instead of re-thresholding
the map 257 times; both give identical counts because saliency values
are integers in [0, 255].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ValidationError
from .localization import BoundingBox

F_MEASURE_BETA_SQ = 0.3
CORLOC_IOU = 0.5


@dataclass(frozen=True)
class EvalRecord:
    """Predicted and reference boxes for one image."""

    image: str
    predicted: tuple[BoundingBox, ...]
    actual: tuple[BoundingBox, ...]


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union with inclusive-pixel box areas."""
    ix_min = max(a.x_min, b.x_min)
    ix_max = min(a.x_max, b.x_max)
    iy_min = max(a.y_min, b.y_min)
    iy_max = min(a.y_max, b.y_max)
    if ix_min > ix_max or iy_min > iy_max:
        return 0.0
    inter = (ix_max - ix_min + 1) * (iy_max - iy_min + 1)
    union = a.area + b.area - inter
    return inter / union


def is_localized(
    predicted: Sequence[BoundingBox], actual: Sequence[BoundingBox]
) -> bool:
    """True when any predicted box clears IoU > 0.5 against any reference
    box. Exactly 0.5 does not count."""
    return any(iou(p, g) > CORLOC_IOU for p in predicted for g in actual)


def corloc(records: Iterable[EvalRecord]) -> float:
    """Fraction of images localized correctly."""
    records = list(records)
    if not records:
        raise ValueError("corloc needs at least one record")
    for r in records:
        if not r.actual:
            raise ValidationError(f"image {r.image!r} has no reference boxes")
    return sum(is_localized(r.predicted, r.actual) for r in records) / len(records)


def normalize_saliency(values: np.ndarray) -> np.ndarray:
    """Min-max rescale a support map to uint8 [0, 255], rounding halves up.
    A constant map has no contrast and comes back all zero."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2:
        raise DimensionError(f"saliency map must be 2-D, got {v.ndim} dims")
    if not np.all(np.isfinite(v)):
        raise ValidationError("saliency map contains non-finite values")
    lo = float(v.min())
    hi = float(v.max())
    if hi <= lo:
        return np.zeros(v.shape, dtype=np.uint8)
    scaled = (v - lo) / (hi - lo) * 255.0
    return np.floor(scaled + 0.5).astype(np.uint8)


def _check_saliency_pair(saliency: np.ndarray, gt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(saliency)
    g = np.asarray(gt, dtype=bool)
    if s.shape != g.shape:
        raise DimensionError(f"saliency shape {s.shape} != mask shape {g.shape}")
    if s.ndim != 2:
        raise DimensionError(f"saliency map must be 2-D, got {s.ndim} dims")
    s = s.astype(np.int64)
    if s.size and (s.min() < 0 or s.max() > 255):
        raise ValidationError("saliency values must lie in [0, 255]")
    return s, g


def mae(saliency: np.ndarray, gt: np.ndarray) -> float:
    """Mean absolute error between the saliency map rescaled to [0, 1]
    and the binary reference mask."""
    s, g = _check_saliency_pair(saliency, gt)
    return float(np.mean(np.abs(s / 255.0 - g.astype(np.float64))))


def f_measure(precision: float, recall: float, beta_sq: float = F_MEASURE_BETA_SQ) -> float:
    """Weighted harmonic mean of precision and recall; 0 when both are 0."""
    for name, v in (("precision", precision), ("recall", recall)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {v}")
    if precision == 0.0 and recall == 0.0:
        return 0.0
    return (1.0 + beta_sq) * precision * recall / (beta_sq * precision + recall)


def max_f_measure(saliency: np.ndarray, gt: np.ndarray) -> tuple[float, int]:
    """Best F-measure over binarizations saliency > t.

    The sweep covers t = -1..255 so the all-positive split is included;
    the reported threshold is clamped to [0, 255]. Ties go to the
    smallest threshold. The mask must mark at least one positive pixel,
    otherwise recall is undefined.
    """
    s, g = _check_saliency_pair(saliency, gt)
    n_pos = int(g.sum())
    if n_pos == 0:
        raise ValidationError("reference mask has no positive pixels")

    pos_hist = np.bincount(s[g], minlength=256)
    all_hist = np.bincount(s.reshape(-1), minlength=256)
    # selected(t) = #{v > t}; prepend t = -1 where everything is selected
    tp = np.concatenate(([n_pos], n_pos - np.cumsum(pos_hist)))
    sel = np.concatenate(([s.size], s.size - np.cumsum(all_hist)))

    precision = np.divide(tp, sel, out=np.zeros(257, dtype=np.float64), where=sel > 0)
    recall = tp / n_pos
    denom = F_MEASURE_BETA_SQ * precision + recall
    f = np.divide(
        (1.0 + F_MEASURE_BETA_SQ) * precision * recall,
        denom,
        out=np.zeros(257, dtype=np.float64),
        where=denom > 0,
    )
    best = int(np.argmax(f))  # first maximum, i.e. smallest threshold
    threshold = max(best - 1, 0)
    return float(f[best]), threshold
