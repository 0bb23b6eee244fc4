"""Deterministic counter-based random words for superpixel selection.

The generator is SplitMix64 in counter form:

    word(seed, i) = mix64((seed + (i + 1) * GAMMA) mod 2**64)

where ``GAMMA`` is the 64-bit golden-ratio increment ``0x9E3779B97F4A7C15``
and ``mix64`` is the SplitMix64 finalizer (xor-shift / multiply chain).
This yields exactly the output stream of the classic sequential SplitMix64
seeded with ``seed`` (first word for seed 0 is ``0xE220A8397B1DCDAF``),
but each word is a pure function of ``(seed, i)``, so streams can be
split by offsetting the counter and results are identical on every
platform, worker count and release.

Uniform doubles are the top 53 bits of a word divided by 2**53, which is
``word / 2**64`` at full float64 precision. Values lie in
``[0, 1 - 2**-53]``; 1.0 is never produced, so a threshold test
``p < r`` selects nothing at r=0 and everything at r=1.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15

_MULT_A = 0xBF58476D1CE4E5B9
_MULT_B = 0x94D049BB133111EB


def words(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Return ``count`` 64-bit words for counters ``offset .. offset+count-1``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MULT_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MULT_B)
    return z ^ (z >> np.uint64(31))


def uniform01(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Return ``count`` float64 uniforms in [0, 1), one per counter position."""
    w = words(seed, count, offset)
    return (w >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)
