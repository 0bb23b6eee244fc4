"""Image and label-map codecs.

Decoding goes through Pillow and accepts PNG and JPEG: color sources
become 3-channel, grayscale PNGs stay single-channel, and 16-bit
grayscale is rescaled to 8-bit by dropping the low byte (v >> 8).

Encoding never goes through Pillow. Augmented outputs are written by a
small built-in PNG encoder (filter 0 rows, zlib level 6, no ancillary
chunks) so identical rasters always produce identical files, which the
end-to-end determinism contract relies on.

Label maps travel either as 16-bit grayscale PNG (k <= 65536) or as a
raw little-endian format: an 8-byte header (width u32, height u32)
followed by row-major u32 labels, plus a text sidecar ``<file>.meta``
recording k and the segmentation parameters.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .core import Image, SuperpixelGrid
from .errors import DecodeError, ParameterError
from .slic import SlicParams

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload))
    )


def encode_png(arr: np.ndarray) -> bytes:
    """Encode (H, W) or (H, W, C) uint8, or (H, W) uint16, deterministically."""
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    h, w = arr.shape[:2]
    if arr.dtype == np.uint8:
        bit_depth = 8
        color_type = 2 if arr.ndim == 3 else 0
        row_bytes = np.ascontiguousarray(arr).reshape(h, -1)
    elif arr.dtype == np.uint16 and arr.ndim == 2:
        bit_depth = 16
        color_type = 0
        row_bytes = np.ascontiguousarray(arr.astype(">u2")).view(np.uint8).reshape(h, -1)
    else:
        raise ParameterError(f"cannot encode dtype {arr.dtype} shape {arr.shape} as PNG")
    ihdr = struct.pack(">IIBBBBB", w, h, bit_depth, color_type, 0, 0, 0)
    raw = b"".join(b"\x00" + row.tobytes() for row in row_bytes)
    return (
        _PNG_SIGNATURE
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", zlib.compress(raw, 6))
        + _chunk(b"IEND", b"")
    )


def save_image(image: Image, path: Union[str, Path]) -> None:
    """Write an Image as deterministic PNG bytes."""
    Path(path).write_bytes(encode_png(image.data))


def load_image(path: Union[str, Path]) -> Image:
    """Decode a PNG or JPEG file into an Image."""
    path = Path(path)
    try:
        with PILImage.open(path) as im:
            if im.format not in ("PNG", "JPEG"):
                raise DecodeError(f"{path}: unsupported format {im.format!r}")
            im.load()
            mode = im.mode
            if mode in ("I", "I;16", "I;16B", "I;16L", "I;16N"):
                arr16 = np.asarray(im).astype(np.uint32)
                arr = (arr16 >> 8).astype(np.uint8)
            elif mode in ("1", "L", "LA"):
                arr = np.asarray(im.convert("L"))
            else:
                arr = np.asarray(im.convert("RGB"))
    except DecodeError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    return Image(np.ascontiguousarray(arr))


def probe_size(path: Union[str, Path]) -> tuple[int, int]:
    """Read (width, height) from an image header without full decode."""
    path = Path(path)
    try:
        with PILImage.open(path) as im:
            if im.format not in ("PNG", "JPEG"):
                raise DecodeError(f"{path}: unsupported format {im.format!r}")
            return im.size
    except DecodeError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def save_label_map(
    grid: SuperpixelGrid,
    path: Union[str, Path],
    params: Optional[SlicParams] = None,
) -> None:
    """Write a label map: 16-bit PNG for .png paths, raw u32 LE otherwise."""
    path = Path(path)
    if path.suffix.lower() == ".png":
        if grid.superpixel_count > 65536:
            raise ParameterError(
                f"{grid.superpixel_count} superpixels exceed the 16-bit PNG limit; "
                "use the raw format"
            )
        path.write_bytes(encode_png(grid.labels.astype(np.uint16)))
        return
    payload = struct.pack("<II", grid.width, grid.height)
    payload += grid.labels.astype("<u4").tobytes()
    path.write_bytes(payload)
    lines = [f"k={grid.superpixel_count}"]
    if params is not None:
        lines += [
            f"superpixels={params.superpixels}",
            f"compactness={params.compactness}",
            f"iterations={params.iterations}",
            f"min_region_fraction={params.min_region_fraction}",
        ]
    Path(str(path) + ".meta").write_text("\n".join(lines) + "\n")


def load_label_map(path: Union[str, Path]) -> SuperpixelGrid:
    """Read a label map written by :func:`save_label_map`."""
    path = Path(path)
    if path.suffix.lower() == ".png":
        try:
            with PILImage.open(path) as im:
                labels = np.asarray(im).astype(np.int32)
        except (UnidentifiedImageError, OSError, SyntaxError) as exc:
            raise DecodeError(f"{path}: {exc}") from exc
        if labels.ndim != 2:
            raise DecodeError(f"{path}: label map must be single-channel")
        return SuperpixelGrid(labels, int(labels.max()) + 1)
    blob = path.read_bytes()
    if len(blob) < 8:
        raise DecodeError(f"{path}: truncated label map header")
    w, h = struct.unpack("<II", blob[:8])
    expected = 8 + 4 * w * h
    if len(blob) != expected:
        raise DecodeError(f"{path}: expected {expected} bytes, found {len(blob)}")
    labels = np.frombuffer(blob, dtype="<u4", offset=8).reshape(h, w).astype(np.int32)
    k = int(labels.max()) + 1
    meta = Path(str(path) + ".meta")
    if meta.exists():
        for line in meta.read_text().splitlines():
            if line.startswith("k="):
                k = int(line[2:])
                break
    return SuperpixelGrid(labels, k)
