"""Batch extraction of relu5/pool5 feature maps to .olmf files."""

import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .model import build_trunk, forward_taps, load_weights, preprocess
from .olmf import write_olmf

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp", ".ppm", ".webp")
FIXED_SIDE = 448
FEATURE_CHANNELS = 512


@dataclass
class ExtractionManifest:
    resolution: str
    pretrained: bool
    weights: str | None
    images: list[dict] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "pretrained": self.pretrained,
            "weights": self.weights,
            "images": self.images,
            "skipped": self.skipped,
        }


def discover_images(source: str) -> list[Path]:
    """A directory yields its image files sorted by name; anything else is
    read as a text file with one image path per line."""
    src = Path(source)
    if src.is_dir():
        found = sorted(
            p for p in src.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
        )
        if not found:
            raise ValueError(f"no image files in directory {source}")
        return found
    lines = src.read_text().splitlines()
    paths = [Path(line.strip()) for line in lines if line.strip()]
    if not paths:
        raise ValueError(f"image list {source} is empty")
    return paths


def expected_shapes(width: int, height: int) -> dict[str, tuple[int, int, int]]:
    return {
        "relu5": (FEATURE_CHANNELS, math.ceil(height / 16), math.ceil(width / 16)),
        "pool5": (FEATURE_CHANNELS, math.ceil(height / 32), math.ceil(width / 32)),
    }


def load_image(path: Path, resolution: str) -> tuple[np.ndarray, int, int]:
    """Decode to RGB; returns (array, original_w, original_h)."""
    with Image.open(path) as img:
        original_w, original_h = img.size
        rgb = img.convert("RGB")
        if resolution == "448":
            rgb = rgb.resize((FIXED_SIDE, FIXED_SIDE), Image.BILINEAR)
        return np.asarray(rgb), original_w, original_h


def run_extraction(
    images: str,
    out_dir: str,
    resolution: str = "448",
    weights: str | None = None,
    seed: int = 0,
    log=None,
) -> ExtractionManifest:
    if resolution not in ("native", "448"):
        raise ValueError(f"resolution must be 'native' or '448', got {resolution!r}")
    log = log if log is not None else (lambda msg: print(msg, file=sys.stderr))
    paths = discover_images(images)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    trunk = build_trunk(seed=seed)
    if weights is not None:
        load_weights(trunk, weights)
    else:
        log("no --weights given, using seeded random initialization; "
            "feature maps will not be semantically meaningful")

    manifest = ExtractionManifest(
        resolution=resolution, pretrained=weights is not None, weights=weights
    )
    for path in paths:
        try:
            rgb, original_w, original_h = load_image(path, resolution)
        except (UnidentifiedImageError, OSError, ValueError) as exc:
            log(f"skipping {path}: {exc}")
            manifest.skipped.append({"path": str(path), "reason": str(exc)})
            continue
        relu5, pool5 = forward_taps(trunk, preprocess(rgb))
        in_h, in_w = rgb.shape[:2]
        contract = expected_shapes(in_w, in_h)
        emitted = {"relu5": relu5.shape, "pool5": pool5.shape}
        for name, shape in emitted.items():
            if tuple(shape) != contract[name]:
                raise RuntimeError(
                    f"{path}: {name} came out {tuple(shape)}, expected {contract[name]}"
                )
        target = out / (path.stem + ".olmf")
        write_olmf([("relu5", relu5), ("pool5", pool5)], str(target))
        manifest.images.append(
            {
                "path": str(path),
                "width": original_w,
                "height": original_h,
                "olmf": str(target),
                "layers": {name: list(shape) for name, shape in emitted.items()},
            }
        )
    return manifest


def write_manifest(manifest: ExtractionManifest, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
