"""End-to-end flows: feature stacks in, boxes / saliency / parts out.

Layer policy: the first name in config.layers sets the working grid;
every further layer is bilinearly resampled onto that grid and the
stacks are concatenated along channels in the listed order.

Box extraction runs on the image-scale support map, so regions whose
upsampled footprints touch are boxed together even if they were separate
at grid scale. An image with no position clearing the support threshold
yields an empty box list, flagged in the output record rather than
raised, so batch runs keep going.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .errors import NoObjectFoundError, ValidationError
from .localization import (
    BoundingBox,
    SupportMap,
    build_support_map,
    connected_components,
    extract_boxes_multi,
    select_frequent_positions,
    upsample_support,
)
from .metrics import normalize_saliency
from .mining import item_frequencies
from .parts import PartCenter, cluster_parts, part_box, part_side_length
from .tensors import FeatureStack, merge_stacks, resize_bilinear
from .transactions import build_transactions


@dataclass
class LocalizationResult:
    image: str
    config: PipelineConfig
    support_grid: SupportMap
    support_image: SupportMap
    boxes: list[BoundingBox]

    @property
    def no_object_found(self) -> bool:
        return not self.boxes


@dataclass
class PartsResult:
    localization: LocalizationResult
    object_box: BoundingBox
    side: float
    centers: list[PartCenter]
    part_boxes: list[BoundingBox]


def select_stack(stacks: list[FeatureStack], layers: tuple[str, ...]) -> FeatureStack:
    """Pick the named layers, resample trailing ones onto the first
    layer's grid, and concatenate channels in the listed order."""
    by_name: dict[str, FeatureStack] = {}
    for s in stacks:
        if s.layer_name in by_name:
            raise ValidationError(f"features file lists layer {s.layer_name!r} twice")
        by_name[s.layer_name] = s
    merged: FeatureStack | None = None
    for name in layers:
        if name not in by_name:
            have = sorted(by_name)
            raise ValidationError(f"features file has no layer {name!r} (found {have})")
        stack = by_name[name]
        if merged is None:
            merged = stack
        else:
            if (stack.height, stack.width) != (merged.height, merged.width):
                stack = resize_bilinear(stack, merged.height, merged.width)
            merged = merge_stacks(merged, stack)
    assert merged is not None  # config validation rejects empty layer lists
    return merged


def run_localization(
    stacks: list[FeatureStack], cfg: PipelineConfig, image: str = ""
) -> LocalizationResult:
    stack = select_stack(stacks, cfg.layers)
    db = build_transactions(stack)
    grid = item_frequencies(db)
    mask = select_frequent_positions(grid, cfg.alpha)
    components = connected_components(mask, cfg.connectivity)
    support_grid = build_support_map(grid, components, cfg.keep)
    support_image = upsample_support(support_grid, cfg.img_h, cfg.img_w)
    boxes = extract_boxes_multi(support_image, cfg.max_boxes, cfg.connectivity)
    return LocalizationResult(
        image=image,
        config=cfg,
        support_grid=support_grid,
        support_image=support_image,
        boxes=boxes,
    )


def saliency_map(result: LocalizationResult) -> np.ndarray:
    """uint8 rendering of the image-scale support map."""
    return normalize_saliency(result.support_image.values)


def run_parts(
    stacks: list[FeatureStack], cfg: PipelineConfig, image: str = ""
) -> PartsResult:
    loc = run_localization(stacks, cfg, image)
    if not loc.boxes:
        raise NoObjectFoundError(f"no object region found in {image or 'input'}")
    object_box = loc.boxes[0]
    side = part_side_length(object_box, cfg.lam)
    centers, _ = cluster_parts(loc.support_image, k=cfg.k, seed=cfg.seed)
    boxes = [part_box(c, side, cfg.img_h, cfg.img_w) for c in centers]
    return PartsResult(
        localization=loc,
        object_box=object_box,
        side=side,
        centers=centers,
        part_boxes=boxes,
    )


def localization_record(result: LocalizationResult) -> dict:
    return {
        "image": result.image,
        "boxes": [b.to_dict() for b in result.boxes],
        "no_object_found": result.no_object_found,
        "config": result.config.to_dict(),
    }


def parts_record(result: PartsResult) -> dict:
    return {
        "image": result.localization.image,
        "no_object_found": False,
        "object_box": result.object_box.to_dict(),
        "side": result.side,
        "parts": [
            {"index": c.index, "x": c.x, "y": c.y, "box": b.to_dict()}
            for c, b in zip(result.centers, result.part_boxes)
        ],
        "config": result.localization.config.to_dict(),
    }
