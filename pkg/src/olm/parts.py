"""Part discovery on a support map.

Every nonzero pixel of the image-scale support map becomes a point
(x, y, s) where s is its support value, so clusters respect both where
the evidence sits and how strong it is. Lloyd k-means with greedy
k-means++ seeding groups the points; cluster centroids, rounded to
pixels and ordered top-to-bottom then left-to-right, are the part
centers. Each part is a square whose side is a fixed fraction of the
shorter object-box side.

k-means is written here rather than imported so that seeding and
tie-breaking are pinned: results must be bit-reproducible for a given
seed across library versions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .localization import BoundingBox, SupportMap

KMEANS_MAX_ITER = 300
KMEANS_REL_TOL = 1e-6


@dataclass
class KMeansResult:
    centers: np.ndarray  # float64 (k, d)
    labels: np.ndarray  # intp (n,)
    objective: float  # final sum of squared distances
    history: tuple[float, ...]  # objective after every assignment pass
    n_iter: int


@dataclass(frozen=True)
class PartCenter:
    """Pixel location of one part, indexed 1..k after (y, x) ordering."""

    index: int
    x: int
    y: int


def _sq_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _seed_centers(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++ seeding. Draws use rng.random() against cumulative
    weights so the sequence of consumed random numbers is fixed."""
    n = points.shape[0]
    idx = min(int(rng.random() * n), n - 1)
    centers = np.empty((k, points.shape[1]), dtype=np.float64)
    centers[0] = points[idx]
    d2 = np.sum((points - points[idx]) ** 2, axis=1)
    for c in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            r = rng.random() * total
            idx = min(int(np.searchsorted(np.cumsum(d2), r, side="right")), n - 1)
        else:
            idx = min(int(rng.random() * n), n - 1)
        centers[c] = points[idx]
        d2 = np.minimum(d2, np.sum((points - points[idx]) ** 2, axis=1))
    return centers


def _repair_empty(labels: np.ndarray, d2: np.ndarray, k: int) -> np.ndarray:
    """Give every empty cluster the point farthest from its own center.
    Donor clusters must keep at least one member."""
    counts = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return labels
    labels = labels.copy()
    own = d2[np.arange(labels.size), labels].copy()
    for c in empty:
        order = np.argsort(-own, kind="stable")
        for p in order:
            p = int(p)
            if counts[labels[p]] > 1:
                counts[labels[p]] -= 1
                labels[p] = c
                counts[c] = 1
                own[p] = -np.inf  # already spent; next empty cluster skips it
                break
    return labels


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = KMEANS_MAX_ITER,
    tol: float = KMEANS_REL_TOL,
) -> KMeansResult:
    """Lloyd iterations until the objective's relative drop is within tol
    or max_iter assignment passes have run. history[i] is the objective
    right after assignment pass i, so it never increases.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError(f"points must be 2-D, got {points.ndim} dims")
    n = points.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < k:
        raise InfeasibleError(f"cannot form {k} clusters from {n} points")

    rng = np.random.default_rng(seed)
    centers = _seed_centers(points, k, rng)

    history: list[float] = []
    labels = np.zeros(n, dtype=np.intp)
    prev_obj: float | None = None
    for _ in range(max_iter):
        d2 = _sq_distances(points, centers)
        labels = np.argmin(d2, axis=1)
        obj = float(d2[np.arange(n), labels].sum())
        history.append(obj)
        labels = _repair_empty(labels, d2, k)
        if prev_obj is not None and prev_obj - obj <= tol * abs(prev_obj):
            break
        prev_obj = obj
        for c in range(k):
            centers[c] = points[labels == c].mean(axis=0)

    return KMeansResult(
        centers=centers,
        labels=labels,
        objective=history[-1],
        history=tuple(history),
        n_iter=len(history),
    )


def cluster_parts(
    smap: SupportMap, k: int = 4, seed: int = 0, support_weight: float = 1.0
) -> tuple[list[PartCenter], KMeansResult]:
    """Part centers from the support map's nonzero pixels. Centroids are
    rounded half-up to pixel coordinates and numbered 1..k in (y, x) order.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    flat = smap.values.reshape(-1)
    nz = np.flatnonzero(flat > 0.0)
    if nz.size < k:
        raise InfeasibleError(
            f"support map has {nz.size} nonzero pixels, cannot place {k} parts"
        )
    ys, xs = np.divmod(nz, smap.w)
    pts = np.stack(
        [xs.astype(np.float64), ys.astype(np.float64), support_weight * flat[nz]],
        axis=1,
    )
    result = kmeans(pts, k, seed=seed)
    px = np.floor(result.centers[:, 0] + 0.5).astype(int)
    py = np.floor(result.centers[:, 1] + 0.5).astype(int)
    order = sorted(range(k), key=lambda i: (py[i], px[i]))
    centers = [
        PartCenter(index=rank + 1, x=int(px[i]), y=int(py[i]))
        for rank, i in enumerate(order)
    ]
    return centers, result


def part_side_length(box: BoundingBox, lam: float) -> float:
    """Square side for parts: lam times the shorter object-box side."""
    if lam <= 0.0:
        raise ValueError(f"lam must be > 0, got {lam}")
    return lam * min(box.width, box.height)


def part_box(center: PartCenter, side: float, img_h: int, img_w: int) -> BoundingBox:
    """Pixels within side/2 of the center along each axis, clipped to the
    image. Extents are inclusive: |x - cx| <= side/2 and likewise for y."""
    if side < 0.0:
        raise ValueError(f"side must be >= 0, got {side}")
    half = side / 2.0
    x_min = max(0, math.ceil(center.x - half))
    x_max = min(img_w - 1, math.floor(center.x + half))
    y_min = max(0, math.ceil(center.y - half))
    y_max = min(img_h - 1, math.floor(center.y + half))
    count = (x_max - x_min + 1) * (y_max - y_min + 1)
    return BoundingBox(x_min=x_min, y_min=y_min, x_max=x_max, y_max=y_max, pixel_count=count)


def part_mask(img_h: int, img_w: int, boxes: list[BoundingBox]) -> np.ndarray:
    """Binary union of part boxes on the image grid."""
    mask = np.zeros((img_h, img_w), dtype=bool)
    for b in boxes:
        mask[b.y_min : b.y_max + 1, b.x_min : b.x_max + 1] = True
    return mask


def crop_part(array: np.ndarray, box: BoundingBox) -> np.ndarray:
    """View of the array restricted to the box; the last two axes are
    treated as (height, width)."""
    return array[..., box.y_min : box.y_max + 1, box.x_min : box.x_max + 1]
