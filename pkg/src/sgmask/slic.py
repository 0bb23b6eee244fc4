"""SLIC superpixel segmentation with deterministic output.

Localized k-means in joint (color, x, y) space: cluster centers start on
a regular grid with step S = sqrt(W*H/q), are nudged to the lowest
gradient pixel of their 3x3 neighborhood, then iterate assignment and
update with each center searching a 2S x 2S window. The squared distance
is d_color^2 + (d_spatial / S)^2 * m^2 with compactness m. A final
connectivity pass relabels fragments smaller than
min_region_fraction * (W*H/q) into their largest adjacent superpixel, so
the returned grid is a full partition of 4-connected regions with
contiguous labels.

Everything is deterministic: no randomness, fixed scan and reduction
orders, ties in the assignment argmin resolved toward the lower center
index. Color images are compared in CIELAB (D65); grayscale images use
the same lightness channel directly, and a color image whose three
channels are identical everywhere is reduced to that lightness channel
so it segments exactly like its single-channel twin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import Image, SuperpixelGrid
from .errors import ParameterError


@dataclass(frozen=True)
class SlicParams:
    """Segmentation knobs: requested superpixel count plus SLIC internals."""

    superpixels: int
    compactness: float = 10.0
    iterations: int = 10
    min_region_fraction: float = 0.25

    def __post_init__(self):
        if self.superpixels < 1:
            raise ParameterError("superpixels must be >= 1")
        if self.compactness <= 0:
            raise ParameterError("compactness must be positive")
        if self.iterations < 1:
            raise ParameterError("iterations must be >= 1")
        if not 0.0 < self.min_region_fraction <= 1.0:
            raise ParameterError("min_region_fraction must lie in (0, 1]")


# sRGB 8-bit value -> linear intensity
_SRGB_LINEAR = np.empty(256, dtype=np.float64)
for _v in range(256):
    _u = _v / 255.0
    _SRGB_LINEAR[_v] = _u / 12.92 if _u <= 0.04045 else ((_u + 0.055) / 1.055) ** 2.4

_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_WHITE = np.array([0.95047, 1.0, 1.08883])

_LAB_EPS = (6.0 / 29.0) ** 3


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _LAB_EPS, np.cbrt(t), t / (3.0 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)


def image_features(image: Image) -> np.ndarray:
    """Float feature raster used for clustering: CIELAB for color, L for gray."""
    data = image.data
    if image.channels == 1 or (
        np.array_equal(data[:, :, 0], data[:, :, 1])
        and np.array_equal(data[:, :, 0], data[:, :, 2])
    ):
        y = _SRGB_LINEAR[data[:, :, :1]]
        return 116.0 * _lab_f(y) - 16.0
    lin = _SRGB_LINEAR[data]
    xyz = lin @ _RGB_TO_XYZ.T
    f = _lab_f(xyz / _XYZ_WHITE)
    lab = np.empty_like(f)
    lab[:, :, 0] = 116.0 * f[:, :, 1] - 16.0
    lab[:, :, 1] = 500.0 * (f[:, :, 0] - f[:, :, 1])
    lab[:, :, 2] = 200.0 * (f[:, :, 1] - f[:, :, 2])
    return lab


def _gradient_map(feat: np.ndarray) -> np.ndarray:
    """Squared central-difference magnitude, borders replicated."""
    px = np.pad(feat, ((0, 0), (1, 1), (0, 0)), mode="edge")
    py = np.pad(feat, ((1, 1), (0, 0), (0, 0)), mode="edge")
    dx = px[:, 2:, :] - px[:, :-2, :]
    dy = py[2:, :, :] - py[:-2, :, :]
    return (dx * dx).sum(axis=2) + (dy * dy).sum(axis=2)


def _init_centers(feat: np.ndarray, q: int):
    """Regular grid of ~q centers, each moved to its 3x3 min-gradient pixel."""
    h, w = feat.shape[:2]
    ny = min(h, max(1, round(math.sqrt(q * h / w))))
    nx = min(w, max(1, round(q / ny)))
    grad = _gradient_map(feat)
    k = nx * ny
    cx = np.empty(k, dtype=np.float64)
    cy = np.empty(k, dtype=np.float64)
    cf = np.empty((k, feat.shape[2]), dtype=np.float64)
    i = 0
    for gy in range(ny):
        y0 = min(h - 1, int((gy + 0.5) * h / ny))
        for gx in range(nx):
            x0 = min(w - 1, int((gx + 0.5) * w / nx))
            bx, by = x0, y0
            best = grad[y0, x0]
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    yy, xx = y0 + dy, x0 + dx
                    if 0 <= yy < h and 0 <= xx < w and grad[yy, xx] < best:
                        best = grad[yy, xx]
                        bx, by = xx, yy
            cx[i] = bx
            cy[i] = by
            cf[i] = feat[by, bx]
            i += 1
    return cx, cy, cf


@njit(cache=True)
def _kmeans_labels(feat, cx, cy, cf, S, m, iterations):  # pragma: no cover - jit
    H, W, C = feat.shape
    k = cx.shape[0]
    labels = np.full((H, W), -1, dtype=np.int32)
    dist = np.empty((H, W), dtype=np.float64)
    w2 = (m * m) / (S * S)
    for _it in range(iterations):
        for y in range(H):
            for x in range(W):
                dist[y, x] = np.inf
                labels[y, x] = -1
        for c in range(k):
            x0 = max(0, int(math.floor(cx[c] - S)))
            x1 = min(W - 1, int(math.ceil(cx[c] + S)))
            y0 = max(0, int(math.floor(cy[c] - S)))
            y1 = min(H - 1, int(math.ceil(cy[c] + S)))
            for y in range(y0, y1 + 1):
                for x in range(x0, x1 + 1):
                    dc = 0.0
                    for ch in range(C):
                        d = feat[y, x, ch] - cf[c, ch]
                        dc += d * d
                    dx = x - cx[c]
                    dy = y - cy[c]
                    D = dc + (dx * dx + dy * dy) * w2
                    if D < dist[y, x]:
                        dist[y, x] = D
                        labels[y, x] = c
        # pixels outside every search window (extreme aspect ratios)
        for y in range(H):
            for x in range(W):
                if labels[y, x] == -1:
                    best = np.inf
                    bc = 0
                    for c in range(k):
                        dc = 0.0
                        for ch in range(C):
                            d = feat[y, x, ch] - cf[c, ch]
                            dc += d * d
                        dx = x - cx[c]
                        dy = y - cy[c]
                        D = dc + (dx * dx + dy * dy) * w2
                        if D < best:
                            best = D
                            bc = c
                    labels[y, x] = bc
        cnt = np.zeros(k, dtype=np.int64)
        sx = np.zeros(k, dtype=np.float64)
        sy = np.zeros(k, dtype=np.float64)
        sf = np.zeros((k, C), dtype=np.float64)
        for y in range(H):
            for x in range(W):
                c = labels[y, x]
                cnt[c] += 1
                sx[c] += x
                sy[c] += y
                for ch in range(C):
                    sf[c, ch] += feat[y, x, ch]
        for c in range(k):
            if cnt[c] > 0:
                cx[c] = sx[c] / cnt[c]
                cy[c] = sy[c] / cnt[c]
                for ch in range(C):
                    cf[c, ch] = sf[c, ch] / cnt[c]
    return labels


@njit(cache=True)
def _connected_components(labels):  # pragma: no cover - jit
    H, W = labels.shape
    comp = np.full((H, W), -1, dtype=np.int32)
    stack = np.empty(H * W, dtype=np.int64)
    ncomp = 0
    for sy in range(H):
        for sx in range(W):
            if comp[sy, sx] != -1:
                continue
            lab = labels[sy, sx]
            comp[sy, sx] = ncomp
            stack[0] = sy * W + sx
            top = 1
            while top > 0:
                top -= 1
                p = stack[top]
                y = p // W
                x = p - y * W
                if x > 0 and comp[y, x - 1] == -1 and labels[y, x - 1] == lab:
                    comp[y, x - 1] = ncomp
                    stack[top] = p - 1
                    top += 1
                if x < W - 1 and comp[y, x + 1] == -1 and labels[y, x + 1] == lab:
                    comp[y, x + 1] = ncomp
                    stack[top] = p + 1
                    top += 1
                if y > 0 and comp[y - 1, x] == -1 and labels[y - 1, x] == lab:
                    comp[y - 1, x] = ncomp
                    stack[top] = p - W
                    top += 1
                if y < H - 1 and comp[y + 1, x] == -1 and labels[y + 1, x] == lab:
                    comp[y + 1, x] = ncomp
                    stack[top] = p + W
                    top += 1
            ncomp += 1
    return comp, ncomp


@njit(cache=True)
def _merge_orphans(sizes, nbr, nbr_start, threshold):  # pragma: no cover - jit
    n = sizes.size
    parent = np.arange(n)
    gsize = sizes.copy()
    for c in range(n):
        if sizes[c] >= threshold:
            continue
        a = c
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        own = a
        best = -1
        best_size = np.int64(-1)
        for ii in range(nbr_start[c], nbr_start[c + 1]):
            b = nbr[ii]
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if b == own:
                continue
            if gsize[b] > best_size or (gsize[b] == best_size and b < best):
                best = b
                best_size = gsize[b]
        if best >= 0:
            parent[own] = best
            gsize[best] += gsize[own]
    roots = np.empty(n, dtype=np.int64)
    for c in range(n):
        a = c
        while parent[a] != a:
            a = parent[a]
        roots[c] = a
    return roots


def _enforce_connectivity(labels: np.ndarray, q: int, min_region_fraction: float):
    """Merge undersized 4-connected fragments into their largest neighbor group."""
    h, w = labels.shape
    comp, ncomp = _connected_components(labels)
    sizes = np.bincount(comp.ravel(), minlength=ncomp).astype(np.int64)
    threshold = min_region_fraction * (h * w / q)

    ah = comp[:, :-1].ravel()
    bh = comp[:, 1:].ravel()
    av = comp[:-1, :].ravel()
    bv = comp[1:, :].ravel()
    mh = ah != bh
    mv = av != bv
    ea = np.concatenate([ah[mh], bh[mh], av[mv], bv[mv]]).astype(np.int64)
    eb = np.concatenate([bh[mh], ah[mh], bv[mv], av[mv]]).astype(np.int64)
    order = np.argsort(ea, kind="stable")
    nbr = eb[order]
    nbr_start = np.searchsorted(ea[order], np.arange(ncomp + 1))

    roots = _merge_orphans(sizes, nbr, nbr_start, float(threshold))
    flat = roots[comp.ravel()]
    uniq, first_idx, inverse = np.unique(flat, return_index=True, return_inverse=True)
    rank = np.empty(uniq.size, dtype=np.int64)
    rank[np.argsort(first_idx, kind="stable")] = np.arange(uniq.size)
    return rank[inverse].reshape(h, w).astype(np.int32), int(uniq.size)


def slic_segment(image: Image, params: SlicParams) -> SuperpixelGrid:
    """Segment an image into roughly equal superpixels.

    The returned grid covers every pixel with 4-connected, contiguously
    numbered labels; its superpixel count tracks the requested
    ``params.superpixels`` but may deviate where the connectivity pass
    merges fragments.
    """
    q = params.superpixels
    if q > image.width * image.height:
        raise ParameterError(
            f"requested {q} superpixels for a {image.width}x{image.height} image"
        )
    feat = image_features(image)
    S = math.sqrt(image.width * image.height / q)
    cx, cy, cf = _init_centers(feat, q)
    labels = _kmeans_labels(
        feat, cx, cy, cf, S, float(params.compactness), int(params.iterations)
    )
    labels, k = _enforce_connectivity(labels, q, params.min_region_fraction)
    return SuperpixelGrid(labels, k)


def relative_size_dispersion(grid: SuperpixelGrid) -> float:
    """Population standard deviation of superpixel areas over their mean."""
    areas = grid.areas().astype(np.float64)
    return float(areas.std() / areas.mean())
