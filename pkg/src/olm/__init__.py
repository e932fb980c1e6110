"""Object localization by mining co-activated positions in stored
convolutional feature maps.

Feature channels become transactions over grid positions, frequent
positions form a support map, and its connected regions yield bounding
boxes, saliency maps, and part locations.
"""

from .config import PipelineConfig, resolve_config
from .errors import (
    CorruptionError,
    DimensionError,
    FormatError,
    InfeasibleError,
    NoObjectFoundError,
    OlmError,
    ValidationError,
)
from .localization import (
    BoundingBox,
    SupportMap,
    build_support_map,
    connected_components,
    extract_box_single,
    extract_boxes_multi,
    select_frequent_positions,
    upsample_support,
)
from .metrics import (
    EvalRecord,
    corloc,
    f_measure,
    iou,
    is_localized,
    mae,
    max_f_measure,
    normalize_saliency,
)
from .mining import (
    FrequencyGrid,
    FrequentItemset,
    item_frequencies,
    load_transaction_file,
    mine_frequent,
    support,
)
from .parts import (
    KMeansResult,
    PartCenter,
    cluster_parts,
    crop_part,
    kmeans,
    part_box,
    part_mask,
    part_side_length,
)
from .pgm import read_pgm, write_pgm
from .pipeline import (
    LocalizationResult,
    PartsResult,
    run_localization,
    run_parts,
    saliency_map,
    select_stack,
)
from .tensors import (
    FeatureStack,
    make_stack,
    merge_stacks,
    read_olmf,
    resample_bilinear,
    resize_bilinear,
    write_olmf,
)
from .transactions import TransactionDatabase, build_transactions, channel_threshold

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "CorruptionError",
    "DimensionError",
    "EvalRecord",
    "FeatureStack",
    "FormatError",
    "FrequencyGrid",
    "FrequentItemset",
    "InfeasibleError",
    "KMeansResult",
    "LocalizationResult",
    "NoObjectFoundError",
    "OlmError",
    "PartCenter",
    "PartsResult",
    "PipelineConfig",
    "SupportMap",
    "TransactionDatabase",
    "ValidationError",
    "build_support_map",
    "build_transactions",
    "channel_threshold",
    "cluster_parts",
    "connected_components",
    "corloc",
    "crop_part",
    "extract_box_single",
    "extract_boxes_multi",
    "f_measure",
    "iou",
    "is_localized",
    "item_frequencies",
    "kmeans",
    "load_transaction_file",
    "mae",
    "make_stack",
    "max_f_measure",
    "merge_stacks",
    "mine_frequent",
    "normalize_saliency",
    "part_box",
    "part_mask",
    "part_side_length",
    "read_olmf",
    "read_pgm",
    "resample_bilinear",
    "resize_bilinear",
    "resolve_config",
    "run_localization",
    "run_parts",
    "saliency_map",
    "select_frequent_positions",
    "select_stack",
    "support",
    "upsample_support",
    "write_olmf",
    "write_pgm",
]
