"""Superpixel-grid mask augmentation.

Segments an image into SLIC superpixels, randomly selects a fraction of
them, and either blacks them out (cut), replaces them with their own
mean color (mean), or swaps in a same-class partner's pixels at the same
positions (mix). Deterministic end to end: the same inputs, parameters
and seed always produce the same bytes.
"""

from .augment import AugmentOutcome, OPERATORS, augment_one, grid_cut, grid_mean, grid_mix
from .core import (
    AugmentConfig,
    Image,
    SelectionMask,
    SuperpixelGrid,
    compose,
    masked_ratio,
    pixel_mask,
    select_superpixels,
)
from .errors import (
    DecodeError,
    DimensionMismatchError,
    ParameterError,
    SgmaskError,
    SizeConstraintError,
)
from .imageio import load_image, load_label_map, save_image, save_label_map
from .pipeline import (
    AugmentationCount,
    BatchResult,
    DatasetIndex,
    IndexEntry,
    ManifestRecord,
    augmentation_count,
    batch_augment,
    derive_seed,
    pair_consecutive,
    read_index_file,
    scan_dataset,
)
from .slic import SlicParams, relative_size_dispersion, slic_segment

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "AugmentOutcome",
    "AugmentationCount",
    "BatchResult",
    "DatasetIndex",
    "DecodeError",
    "DimensionMismatchError",
    "Image",
    "IndexEntry",
    "ManifestRecord",
    "OPERATORS",
    "ParameterError",
    "SelectionMask",
    "SgmaskError",
    "SizeConstraintError",
    "SlicParams",
    "SuperpixelGrid",
    "augment_one",
    "augmentation_count",
    "batch_augment",
    "compose",
    "derive_seed",
    "grid_cut",
    "grid_mean",
    "grid_mix",
    "load_image",
    "load_label_map",
    "masked_ratio",
    "pair_consecutive",
    "pixel_mask",
    "read_index_file",
    "relative_size_dispersion",
    "save_image",
    "save_label_map",
    "scan_dataset",
    "select_superpixels",
    "slic_segment",
    "__version__",
]
