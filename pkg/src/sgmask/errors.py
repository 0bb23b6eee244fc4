"""Exception types shared across the library.

The CLI maps these onto its exit-code contract: decode/IO problems exit
with 2, constraint violations (dimension, parameter, partner size) with 3.
"""


class SgmaskError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(SgmaskError):
    """Shapes or channel counts of related rasters do not agree."""


class ParameterError(SgmaskError):
    """A parameter is outside its documented domain."""


class SizeConstraintError(SgmaskError):
    """A mix partner is smaller than the segmented image in some dimension."""


class DecodeError(SgmaskError):
    """An input file could not be decoded as a supported image."""
