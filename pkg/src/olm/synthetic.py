"""Synthetic feature stacks with a planted rectangle.

A known rectangular region is activated in a fixed fraction of channels,
the rest carry sparse unrelated spikes, so the whole chain from
thresholding through box extraction can be checked against ground truth
that is known by construction.

Value ranges are chosen so thresholding is exact, not statistical: in an
object channel the rectangle draws from [5, 10] and the off-rectangle
noise from [0.05, 0.45]. The positive mean then always lands strictly
between the noise maximum and the rectangle minimum (worst cases: mean
>= (A*5 + (total-A)*0.05)/total > 0.45 for any rectangle of at least 10%
area, and mean <= (A*10 + (total-A)*0.45)/total < 5 for at most 40%
area), so a channel's transaction is exactly its rectangle cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .localization import BoundingBox
from .tensors import FeatureStack, make_stack

GRID_SIDE = 28
CHANNELS = 1024
OBJECT_CHANNEL_FRACTION = 0.4
MIN_AREA_FRACTION = 0.10
MAX_AREA_FRACTION = 0.40


@dataclass(frozen=True)
class PlantedScene:
    """A feature stack plus the grid-cell rectangle hidden inside it.
    rect is (x0, y0, x1, y1), inclusive cell coordinates."""

    stack: FeatureStack
    rect: tuple[int, int, int, int]

    @property
    def grid_h(self) -> int:
        return self.stack.height

    @property
    def grid_w(self) -> int:
        return self.stack.width


def plant_scene(
    rng: np.random.Generator,
    grid_h: int = GRID_SIDE,
    grid_w: int = GRID_SIDE,
    channels: int = CHANNELS,
    object_fraction: float = OBJECT_CHANNEL_FRACTION,
    min_area_fraction: float = MIN_AREA_FRACTION,
    max_area_fraction: float = MAX_AREA_FRACTION,
) -> PlantedScene:
    """Draw a rectangle covering between min and max area fraction of the
    grid, activate it in object_fraction of the channels, and scatter 3-6
    strong spikes in each remaining channel."""
    total = grid_h * grid_w
    while True:
        rect_h = int(rng.integers(2, grid_h + 1))
        rect_w = int(rng.integers(2, grid_w + 1))
        if min_area_fraction <= rect_h * rect_w / total <= max_area_fraction:
            break
    y0 = int(rng.integers(0, grid_h - rect_h + 1))
    x0 = int(rng.integers(0, grid_w - rect_w + 1))

    n_object = int(object_fraction * channels)
    perm = rng.permutation(channels)
    object_channels = perm[:n_object]
    background_channels = perm[n_object:]

    data = np.zeros((channels, grid_h, grid_w), dtype=np.float64)
    noise = rng.uniform(0.05, 0.45, size=(n_object, grid_h, grid_w))
    data[object_channels] = noise
    data[
        object_channels[:, None, None],
        np.arange(y0, y0 + rect_h)[None, :, None],
        np.arange(x0, x0 + rect_w)[None, None, :],
    ] = rng.uniform(5.0, 10.0, size=(n_object, rect_h, rect_w))

    flat = data.reshape(channels, -1)
    for c in background_channels:
        k = int(rng.integers(3, 7))
        spots = rng.permutation(total)[:k]
        flat[c, spots] = rng.uniform(5.0, 10.0, size=k)

    stack = make_stack("synthetic", data.astype(np.float32))
    return PlantedScene(stack=stack, rect=(x0, y0, x0 + rect_w - 1, y0 + rect_h - 1))


def _axis_span(c0: int, c1: int, grid: int, img: int) -> tuple[int, int]:
    """Pixels whose bilinear sample takes nonzero weight from cells
    [c0, c1]: source coordinate (x+0.5)*grid/img - 0.5, clamped to the
    grid, must fall strictly inside (c0 - 1, c1 + 1)."""
    xs = np.arange(img, dtype=np.float64)
    src = np.clip((xs + 0.5) * (grid / img) - 0.5, 0.0, grid - 1.0)
    inside = np.flatnonzero((src > c0 - 1.0) & (src < c1 + 1.0))
    return int(inside[0]), int(inside[-1])


def footprint_box(
    rect: tuple[int, int, int, int], grid_h: int, grid_w: int, img_h: int, img_w: int
) -> BoundingBox:
    """Tight box around the image pixels where a grid-cell rectangle stays
    nonzero after bilinear upsampling. Computed from the coordinate
    mapping alone, without running the resampler."""
    x0, y0, x1, y1 = rect
    px0, px1 = _axis_span(x0, x1, grid_w, img_w)
    py0, py1 = _axis_span(y0, y1, grid_h, img_h)
    return BoundingBox(
        x_min=px0,
        y_min=py0,
        x_max=px1,
        y_max=py1,
        pixel_count=(px1 - px0 + 1) * (py1 - py0 + 1),
    )
