"""Synthetic test images with known dimensions, plus binary noise fields."""

from __future__ import annotations

import math

import numpy as np

from .boxcount import _hash_words
from .errors import ContractViolation
from .imagecore import BinaryImage

__all__ = [
    "TRIANGLE_DIMENSION",
    "CARPET_DIMENSION",
    "sierpinski_triangle",
    "sierpinski_carpet",
    "salt_pepper",
    "primitives",
]

TRIANGLE_DIMENSION = math.log(3) / math.log(2)
CARPET_DIMENSION = math.log(8) / math.log(3)

# keeps the noise stream disjoint from the box-filter stream (s >= 0)
_NOISE_TAG = -1


def sierpinski_triangle(order: int) -> BinaryImage:
    """``2**k`` square with pixel ``(i, j)`` set iff ``i & j == 0``."""
    if not 1 <= order <= 14:
        raise ContractViolation(f"triangle order must be in [1, 14], got {order}")
    idx = np.arange(1 << order)
    return BinaryImage((idx[:, None] & idx[None, :]) == 0)


def sierpinski_carpet(order: int) -> BinaryImage:
    """``3**k`` square; a pixel is cleared when any base-3 digit position
    has digit 1 in both coordinates."""
    if not 1 <= order <= 8:
        raise ContractViolation(f"carpet order must be in [1, 8], got {order}")
    n = 3**order
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    hole = np.zeros((n, n), dtype=bool)
    for _ in range(order):
        hole |= (i % 3 == 1) & (j % 3 == 1)
        i, j = i // 3, j // 3
    return BinaryImage(~hole)


def salt_pepper(width: int, height: int, density: float, seed: int = 0) -> BinaryImage:
    """Independent Bernoulli(density) objects, keyed per pixel by ``seed``."""
    if not 0.0 <= density <= 1.0:
        raise ContractViolation(f"density must be in [0, 1], got {density}")
    rows, cols = np.indices((height, width))
    h = _hash_words(np.uint64(seed), _NOISE_TAG, rows, cols)
    u = (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
    return BinaryImage(u < density)


def primitives(kind: str, size: int) -> BinaryImage:
    """Canonical ``size x size`` fixtures.

    ``filled_rect`` is all ones, ``hline`` is row 0, ``point`` is pixel
    (0, 0) and ``ring`` is the outline of the centred square that leaves a
    one-pixel margin.
    """
    if size < 1:
        raise ContractViolation("size must be >= 1")
    img = np.zeros((size, size), dtype=np.uint8)
    if kind == "filled_rect":
        img[:] = 1
    elif kind == "hline":
        img[0, :] = 1
    elif kind == "point":
        img[0, 0] = 1
    elif kind == "ring":
        if size < 3:
            raise ContractViolation("ring needs size >= 3")
        img[1:-1, 1:-1] = 1
        img[2:-2, 2:-2] = 0
    else:
        raise ContractViolation(f"unknown primitive {kind!r}")
    return BinaryImage(img)
