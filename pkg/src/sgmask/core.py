"""Core raster types, random superpixel selection and mask composition.

The three augmentation operators all reduce to one rule: build a
per-superpixel boolean selection, broadcast it to a per-pixel mask, and
compose two images through that mask (output takes the replacement image
where the mask is true and the original elsewhere).

All types freeze their arrays on construction and every operation is a
pure function, so values can be shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, ParameterError
from .rng import uniform01

GRID_TYPES = ("slic",)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Image:
    """8-bit raster, shape (height, width, channels) with 1 or 3 channels.

    The wrapped array is marked read-only in place; pass a copy if the
    caller needs to keep mutating its buffer.
    """

    data: np.ndarray

    def __post_init__(self):
        d = self.data
        if not isinstance(d, np.ndarray) or d.dtype != np.uint8:
            raise ParameterError("image data must be a uint8 ndarray")
        if d.ndim != 3 or d.shape[2] not in (1, 3):
            raise ParameterError(
                f"image data must have shape (H, W, C) with C in {{1, 3}}, got {d.shape}"
            )
        if d.shape[0] < 1 or d.shape[1] < 1:
            raise ParameterError("image must be at least 1x1")
        if not d.flags.c_contiguous:
            object.__setattr__(self, "data", np.ascontiguousarray(d))
        _freeze(self.data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Image":
        """Build an Image from (H, W) or (H, W, C) uint8 data, copying it."""
        a = np.asarray(arr)
        if a.ndim == 2:
            a = a[:, :, np.newaxis]
        return cls(np.ascontiguousarray(a, dtype=np.uint8).copy())

    def same_extent(self, other: "Image") -> bool:
        return self.width == other.width and self.height == other.height


@dataclass(frozen=True)
class SuperpixelGrid:
    """Per-pixel label map partitioning an image into k superpixels.

    Labels are contiguous ints 0..k-1 and every label occurs at least
    once; construction checks both. 4-connectivity of each label is
    guaranteed by the segmenter and verified by the test suite rather
    than re-checked here (a full flood fill per construction would
    dominate runtime).
    """

    labels: np.ndarray
    superpixel_count: int

    def __post_init__(self):
        lab = self.labels
        if not isinstance(lab, np.ndarray) or lab.ndim != 2:
            raise ParameterError("labels must be a 2-D ndarray")
        if lab.dtype != np.int32:
            object.__setattr__(self, "labels", lab.astype(np.int32))
            lab = self.labels
        k = self.superpixel_count
        if k < 1:
            raise ParameterError("superpixel_count must be >= 1")
        counts = np.bincount(lab.ravel(), minlength=k)
        if lab.min() < 0 or lab.max() >= k:
            raise ParameterError("labels out of range [0, k)")
        if counts.size != k or (counts == 0).any():
            raise ParameterError("every label in [0, k) must occur at least once")
        _freeze(lab)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def areas(self) -> np.ndarray:
        """Pixel count per superpixel, indexed by label."""
        return np.bincount(self.labels.ravel(), minlength=self.superpixel_count)


@dataclass(frozen=True)
class SelectionMask:
    """Boolean processed/untouched flag per superpixel."""

    flags: np.ndarray

    def __post_init__(self):
        f = self.flags
        if not isinstance(f, np.ndarray) or f.ndim != 1 or f.dtype != np.bool_:
            raise ParameterError("flags must be a 1-D bool ndarray")
        _freeze(f)

    def __len__(self) -> int:
        return self.flags.size

    @property
    def selected_count(self) -> int:
        return int(self.flags.sum())


@dataclass(frozen=True)
class AugmentConfig:
    """Parameter record shared by all operators.

    ``grid_type`` names the segmentation backend (only "slic" ships),
    ``seed`` positions the random selection, ``superpixels`` is the
    requested grid size and ``ratio`` the target fraction of processed
    superpixels. ``compactness`` and ``iterations`` tune the SLIC
    backend.
    """

    seed: int
    superpixels: int
    ratio: float
    grid_type: str = "slic"
    compactness: float = 10.0
    iterations: int = 10

    def __post_init__(self):
        if self.grid_type not in GRID_TYPES:
            raise ParameterError(f"unknown grid type {self.grid_type!r}")
        if not 0.0 <= self.ratio <= 1.0:
            raise ParameterError("ratio must lie in [0, 1]")
        if self.superpixels < 1:
            raise ParameterError("superpixels must be >= 1")
        if self.compactness <= 0:
            raise ParameterError("compactness must be positive")
        if self.iterations < 1:
            raise ParameterError("iterations must be >= 1")


def select_superpixels(grid: SuperpixelGrid, ratio: float, seed: int) -> SelectionMask:
    """Draw one uniform per superpixel and flag those with p < ratio.

    Draws use the documented counter generator (see :mod:`sgmask.rng`),
    one per label in ascending order, so the mask depends only on
    (superpixel_count, ratio, seed).
    """
    if not 0.0 <= ratio <= 1.0:
        raise ParameterError("ratio must lie in [0, 1]")
    p = uniform01(seed, grid.superpixel_count)
    return SelectionMask(p < ratio)


def pixel_mask(grid: SuperpixelGrid, selection: SelectionMask) -> np.ndarray:
    """Broadcast a per-superpixel selection to a per-pixel boolean raster."""
    if len(selection) != grid.superpixel_count:
        raise DimensionMismatchError(
            f"selection holds {len(selection)} flags for {grid.superpixel_count} superpixels"
        )
    return selection.flags[grid.labels]


def compose(original: Image, replacement: Image, mask: np.ndarray) -> Image:
    """Merge two equally-sized images: replacement where mask, original elsewhere."""
    if mask.shape != (original.height, original.width):
        raise DimensionMismatchError(
            f"mask shape {mask.shape} does not match image {original.data.shape[:2]}"
        )
    if original.data.shape != replacement.data.shape:
        raise DimensionMismatchError(
            f"image shapes differ: {original.data.shape} vs {replacement.data.shape}"
        )
    out = np.where(mask[:, :, np.newaxis], replacement.data, original.data)
    return Image(out)


def masked_ratio(mask: np.ndarray) -> float:
    """Fraction of true pixels in a boolean raster."""
    return float(np.count_nonzero(mask)) / mask.size
