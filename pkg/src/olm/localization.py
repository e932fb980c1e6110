"""From frequency grids to support maps and bounding boxes.

Positions whose item frequency clears the support threshold are grouped by
spatial continuity; isolated groups are background, so either the largest
connected component or all components are kept. The kept frequencies form
the support map, which is upsampled to image resolution and boxed.

Connected-component labeling is run-based: maximal horizontal runs are
extracted per row with vectorized diffs and merged across rows with a
union-find, so cost scales with the number of runs, not pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NoObjectFoundError
from .mining import FrequencyGrid
from .tensors import resample_bilinear

GRID_SCALE = "grid"
IMAGE_SCALE = "image"


@dataclass
class SupportMap:
    """Per-position support values s(y, x) in [0, 1], zero off the kept
    component(s). scale says whether positions are grid cells or image pixels."""

    values: np.ndarray  # float64, shape (h, w)
    scale: str

    @property
    def h(self) -> int:
        return self.values.shape[0]

    @property
    def w(self) -> int:
        return self.values.shape[1]

    @property
    def has_object(self) -> bool:
        return bool(np.any(self.values > 0.0))


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box with inclusive pixel coordinates."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int
    pixel_count: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(
                f"degenerate box ({self.x_min},{self.y_min})..({self.x_max},{self.y_max})"
            )

    @property
    def width(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def height(self) -> int:
        return self.y_max - self.y_min + 1

    @property
    def area(self) -> int:
        return self.width * self.height

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "y_min": self.y_min,
            "x_max": self.x_max,
            "y_max": self.y_max,
            "pixel_count": self.pixel_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoundingBox":
        x_min, y_min = int(d["x_min"]), int(d["y_min"])
        x_max, y_max = int(d["x_max"]), int(d["y_max"])
        area = (x_max - x_min + 1) * (y_max - y_min + 1)
        return cls(x_min, y_min, x_max, y_max, int(d.get("pixel_count", area)))


def select_frequent_positions(grid: FrequencyGrid, alpha: float) -> np.ndarray:
    """Binary grid of positions whose frequency ratio is >= alpha."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    return grid.ratios >= alpha


def _row_runs(row: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Half-open [start, end) spans of consecutive True values in one row."""
    padded = np.zeros(row.size + 2, dtype=np.int8)
    padded[1:-1] = row
    delta = np.diff(padded)
    return np.flatnonzero(delta == 1), np.flatnonzero(delta == -1)


def connected_components(mask: np.ndarray, connectivity: int = 8) -> list[np.ndarray]:
    """Partition the True positions of a binary grid into maximal connected
    sets. Returns flat row-major index arrays (each sorted ascending), ordered
    by size descending, ties broken by smallest minimum position.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise DimensionError(f"mask must be 2-D, got {mask.ndim} dims")
    h, w = mask.shape
    reach = 0 if connectivity == 4 else 1

    parent: list[int] = []

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    runs: list[tuple[int, int, int]] = []  # (row, start, end) per run id
    prev: list[tuple[int, int, int]] = []  # (start, end, run id) in last row
    for y in range(h):
        starts, ends = _row_runs(mask[y])
        cur = []
        for s, e in zip(starts.tolist(), ends.tolist()):
            rid = len(parent)
            parent.append(rid)
            runs.append((y, s, e))
            cur.append((s, e, rid))
        i = j = 0
        while i < len(prev) and j < len(cur):
            ps, pe, pid = prev[i]
            cs, ce, cid = cur[j]
            if ps < ce + reach and cs < pe + reach:
                parent[find(pid)] = find(cid)
            if pe < ce:
                i += 1
            else:
                j += 1
        prev = cur

    # group runs by root; run ids are row-major, so per-group spans stay sorted
    groups: dict[int, list[int]] = {}
    for rid in range(len(parent)):
        groups.setdefault(find(rid), []).append(rid)

    components = []
    for rids in groups.values():
        spans = [runs[r] for r in rids]
        idx = np.concatenate(
            [np.arange(y * w + s, y * w + e, dtype=np.intp) for (y, s, e) in spans]
        )
        components.append(idx)
    components.sort(key=lambda idx: (-idx.size, int(idx[0])))
    return components


def build_support_map(
    grid: FrequencyGrid, components: list[np.ndarray], keep: str = "largest"
) -> SupportMap:
    """Support map at grid scale: the frequency ratio on kept components,
    zero elsewhere. An empty component list yields an all-zero map, which
    callers detect through SupportMap.has_object.
    """
    if keep not in ("largest", "all"):
        raise ValueError(f"keep must be 'largest' or 'all', got {keep!r}")
    values = np.zeros((grid.grid_h, grid.grid_w), dtype=np.float64)
    if components:
        kept = components[:1] if keep == "largest" else components
        ratios = grid.ratios.reshape(-1)
        flat = values.reshape(-1)
        for idx in kept:
            flat[idx] = ratios[idx]
    return SupportMap(values=values, scale=GRID_SCALE)


def upsample_support(smap: SupportMap, img_h: int, img_w: int) -> SupportMap:
    """Bilinearly resample a grid-scale support map to image resolution."""
    if smap.scale != GRID_SCALE:
        raise ValueError(f"expected a grid-scale map, got scale {smap.scale!r}")
    values = resample_bilinear(smap.values, img_h, img_w)
    return SupportMap(values=values, scale=IMAGE_SCALE)


def _component_box(idx: np.ndarray, w: int) -> BoundingBox:
    ys, xs = np.divmod(idx, w)
    return BoundingBox(
        x_min=int(xs.min()),
        y_min=int(ys.min()),
        x_max=int(xs.max()),
        y_max=int(ys.max()),
        pixel_count=int(idx.size),
    )


def extract_box_single(smap: SupportMap, connectivity: int = 8) -> BoundingBox:
    """Tight box around the largest connected nonzero region of the map."""
    components = connected_components(smap.values > 0.0, connectivity)
    if not components:
        raise NoObjectFoundError("support map has no nonzero position")
    return _component_box(components[0], smap.w)


def extract_boxes_multi(
    smap: SupportMap, max_boxes: int | None = None, connectivity: int = 8
) -> list[BoundingBox]:
    """One tight box per connected nonzero region, largest first (ties by
    smallest minimum position), truncated to max_boxes when given."""
    if max_boxes is not None and max_boxes < 1:
        raise ValueError(f"max_boxes must be >= 1, got {max_boxes}")
    components = connected_components(smap.values > 0.0, connectivity)
    boxes = [_component_box(idx, smap.w) for idx in components]
    if max_boxes is not None:
        boxes = boxes[:max_boxes]
    return boxes
