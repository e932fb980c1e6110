from .extract import (
    ExtractionManifest,
    discover_images,
    expected_shapes,
    run_extraction,
    write_manifest,
)
from .model import (
    INPUT_MEAN,
    INPUT_STD,
    build_trunk,
    forward_taps,
    load_weights,
    preprocess,
)
from .olmf import write_olmf

__version__ = "0.1.0"

__all__ = [
    "ExtractionManifest",
    "INPUT_MEAN",
    "INPUT_STD",
    "build_trunk",
    "discover_images",
    "expected_shapes",
    "forward_taps",
    "load_weights",
    "preprocess",
    "run_extraction",
    "write_manifest",
    "write_olmf",
]
