"""The three augmentation operators: cut, mean and mix.

Each is the unified composition rule specialized to one replacement
image: zeros for cut, the per-superpixel mean image for mean, and a
same-class partner for mix. Selected superpixels take the replacement's
pixels; every other pixel stays byte-identical to the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    AugmentConfig,
    Image,
    SelectionMask,
    SuperpixelGrid,
    pixel_mask,
    select_superpixels,
)
from .errors import DimensionMismatchError, ParameterError, SizeConstraintError
from .slic import SlicParams, slic_segment

OPERATORS = ("cut", "mean", "mix")


@dataclass(frozen=True)
class AugmentOutcome:
    """One augmented image plus everything needed to reproduce it.

    ``partner_id`` identifies the mixed-in source; only mix outcomes may
    carry one (it stays None when the partner was an anonymous in-memory
    image).
    """

    image: Image
    grid: SuperpixelGrid
    selection: SelectionMask
    operator: str
    config: AugmentConfig
    partner_id: Optional[str] = None

    def __post_init__(self):
        if self.partner_id is not None and self.operator != "mix":
            raise ParameterError("partner_id is only meaningful for mix outcomes")


def _check_grid(image: Image, grid: SuperpixelGrid) -> None:
    if (grid.height, grid.width) != (image.height, image.width):
        raise DimensionMismatchError(
            f"grid {grid.width}x{grid.height} does not match image "
            f"{image.width}x{image.height}"
        )


def grid_cut(image: Image, grid: SuperpixelGrid, selection: SelectionMask) -> Image:
    """Blacken the selected superpixels (all channels to 0)."""
    _check_grid(image, grid)
    mask = pixel_mask(grid, selection)
    out = image.data.copy()
    out[mask] = 0
    return Image(out)


def _superpixel_means(image: Image, grid: SuperpixelGrid) -> np.ndarray:
    """Per-superpixel per-channel mean, exact integer half-up rounding."""
    flat_labels = grid.labels.ravel()
    counts = np.bincount(flat_labels, minlength=grid.superpixel_count).astype(np.int64)
    means = np.empty((grid.superpixel_count, image.channels), dtype=np.uint8)
    for ch in range(image.channels):
        # float64 bincount sums stay exact integers below 2**53
        sums = np.bincount(
            flat_labels,
            weights=image.data[:, :, ch].ravel().astype(np.float64),
            minlength=grid.superpixel_count,
        ).astype(np.int64)
        means[:, ch] = (2 * sums + counts) // (2 * counts)
    return means


def grid_mean(image: Image, grid: SuperpixelGrid, selection: SelectionMask) -> Image:
    """Replace each selected superpixel by its own mean color."""
    _check_grid(image, grid)
    mask = pixel_mask(grid, selection)
    means = _superpixel_means(image, grid)
    out = image.data.copy()
    out[mask] = means[grid.labels[mask]]
    return Image(out)


def grid_mix(
    image: Image, partner: Image, grid: SuperpixelGrid, selection: SelectionMask
) -> Image:
    """Copy the partner's pixels, at identical positions, into the selected superpixels.

    The partner must cover the image in both dimensions; both rasters are
    anchored at their top-left corner.
    """
    _check_grid(image, grid)
    if partner.width < image.width or partner.height < image.height:
        raise SizeConstraintError(
            f"mix partner {partner.width}x{partner.height} is smaller than the "
            f"image {image.width}x{image.height}"
        )
    if partner.channels != image.channels:
        raise DimensionMismatchError(
            f"channel counts differ: {image.channels} vs {partner.channels}"
        )
    mask = pixel_mask(grid, selection)
    out = image.data.copy()
    out[mask] = partner.data[: image.height, : image.width][mask]
    return Image(out)


def augment_one(
    image: Image,
    operator: str,
    config: AugmentConfig,
    partner: Optional[Image] = None,
    partner_id: Optional[str] = None,
) -> AugmentOutcome:
    """Segment, select and apply one operator; returns full provenance."""
    if operator not in OPERATORS:
        raise ParameterError(f"unknown operator {operator!r}")
    if (partner is not None) != (operator == "mix"):
        raise ParameterError("a partner image is required exactly when operator is mix")
    grid = slic_segment(
        image,
        SlicParams(
            superpixels=config.superpixels,
            compactness=config.compactness,
            iterations=config.iterations,
        ),
    )
    selection = select_superpixels(grid, config.ratio, config.seed)
    if operator == "cut":
        out = grid_cut(image, grid, selection)
    elif operator == "mean":
        out = grid_mean(image, grid, selection)
    else:
        out = grid_mix(image, partner, grid, selection)
    return AugmentOutcome(
        image=out,
        grid=grid,
        selection=selection,
        operator=operator,
        config=config,
        partner_id=partner_id if operator == "mix" else None,
    )
