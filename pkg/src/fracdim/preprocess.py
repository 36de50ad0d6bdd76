"""Optional preprocessing chain: gray conversion, binarization, denoising,
edge extraction and thinning.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .imagecore import BinaryImage, ColorImage, GrayImage

__all__ = [
    "min_average_gray",
    "OtsuResult",
    "otsu_threshold",
    "between_class_variance",
    "denoise_median3",
    "extract_edges",
    "skeletonize",
]


def min_average_gray(image: ColorImage) -> GrayImage:
    """Gray level ``(min(R, G, B) + mean(R, G, B)) / 2``, rounded half up."""
    rgb = image.pixels.astype(np.int64)
    # (min + sum/3) / 2 == (3*min + sum) / 6, rounded half up in integers
    num = 3 * rgb.min(axis=2) + rgb.sum(axis=2)
    return GrayImage(np.clip((num + 3) // 6, 0, 255))


class OtsuResult(NamedTuple):
    threshold: int
    binary: BinaryImage
    degenerate: bool


def between_class_variance(hist: np.ndarray) -> np.ndarray:
    """Between-class variance for every split ``{< t} | {>= t}``, t = 0..255.

    Values are unnormalized (``w0 * w1 * (mu0 - mu1)**2`` in pixel counts)
    and computed in exact integer-friendly float form.
    """
    hist = np.asarray(hist, dtype=np.float64)
    levels = np.arange(hist.size, dtype=np.float64)
    # w0[t], s0[t]: pixel count and intensity sum of levels strictly below t
    w0 = np.concatenate(([0.0], np.cumsum(hist)[:-1]))
    s0 = np.concatenate(([0.0], np.cumsum(hist * levels)[:-1]))
    total, stotal = hist.sum(), (hist * levels).sum()
    w1, s1 = total - w0, stotal - s0
    with np.errstate(divide="ignore", invalid="ignore"):
        var = (s0 * w1 - s1 * w0) ** 2 / (w0 * w1 * total * total)
    var[(w0 == 0) | (w1 == 0)] = 0.0
    return var


def otsu_threshold(image: GrayImage) -> OtsuResult:
    """Global Otsu threshold; pixels darker than the threshold become objects.

    The lowest maximizing threshold wins ties. A constant image yields its
    own value as threshold, an empty binary image and ``degenerate=True``.
    """
    px = image.pixels
    hist = np.bincount(px.ravel(), minlength=256)
    var = between_class_variance(hist)
    if not np.any(var > 0):
        t = int(px.flat[0])
        return OtsuResult(t, BinaryImage(np.zeros(px.shape, np.uint8)), True)
    t = int(np.argmax(var))
    return OtsuResult(t, BinaryImage(px < t), False)


def _neighbour_sum(arr: np.ndarray) -> np.ndarray:
    """Sum over the in-bounds 3x3 neighbourhood (centre included)."""
    from scipy.ndimage import convolve

    return convolve(arr.astype(np.int32), np.ones((3, 3), np.int32), mode="constant", cval=0)


def denoise_median3(image: BinaryImage) -> BinaryImage:
    """3x3 majority filter. Border pixels vote over the in-bounds window only;
    an exact tie keeps the original pixel."""
    px = image.pixels
    ones = _neighbour_sum(px)
    support = _neighbour_sum(np.ones_like(px))
    twice = 2 * ones
    out = np.where(twice > support, 1, np.where(twice < support, 0, px))
    return BinaryImage(out.astype(np.uint8))


def extract_edges(image: BinaryImage) -> BinaryImage:
    """Interior boundary: object pixels with a background (or off-image)
    4-neighbour."""
    px = image.pixels.astype(bool)
    padded = np.pad(px, 1, constant_values=False)
    interior = padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    return BinaryImage(px & ~interior)


def _zs_neighbours(img: np.ndarray):
    p = np.pad(img, 1, constant_values=0)
    # P2..P9 clockwise starting north
    return (
        p[:-2, 1:-1], p[:-2, 2:], p[1:-1, 2:], p[2:, 2:],
        p[2:, 1:-1], p[2:, :-2], p[1:-1, :-2], p[:-2, :-2],
    )


def skeletonize(image: BinaryImage, max_iter: int | None = None) -> BinaryImage:
    """Zhang-Suen thinning iterated to a fixpoint.

    Each sub-iteration evaluates all deletion conditions on the image as it
    stood at the start of that sub-iteration. Pixels outside the image count
    as background.
    """
    img = image.pixels.astype(np.uint8).copy()
    it = 0
    while True:
        changed = False
        for step in (0, 1):
            nb = _zs_neighbours(img)
            p2, p3, p4, p5, p6, p7, p8, p9 = nb
            b = sum(x.astype(np.int32) for x in nb)
            seq = nb + (p2,)
            a = sum(((seq[k] == 0) & (seq[k + 1] == 1)).astype(np.int32) for k in range(8))
            if step == 0:
                c1 = (p2 & p4 & p6) == 0
                c2 = (p4 & p6 & p8) == 0
            else:
                c1 = (p2 & p4 & p8) == 0
                c2 = (p2 & p6 & p8) == 0
            delete = (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & c1 & c2
            if delete.any():
                img[delete] = 0
                changed = True
        it += 1
        if not changed or (max_iter is not None and it >= max_iter):
            break
    return BinaryImage(img)
