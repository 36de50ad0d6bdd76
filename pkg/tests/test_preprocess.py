import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import ndimage

from fracdim.generators import primitives, sierpinski_carpet, sierpinski_triangle
from fracdim.imagecore import BinaryImage, ColorImage, GrayImage
from fracdim.preprocess import (
    denoise_median3,
    extract_edges,
    min_average_gray,
    otsu_threshold,
    skeletonize,
)

from oracles import otsu_bruteforce, zhang_suen_reference

binary_arrays = st.tuples(st.integers(1, 16), st.integers(1, 16)).flatmap(
    lambda hw: arrays(np.uint8, hw, elements=st.integers(0, 1))
)


@pytest.mark.parametrize(
    "rgb, gray",
    [((100, 100, 100), 100), ((0, 0, 255), 43), ((255, 255, 255), 255), ((0, 0, 0), 0)],
)
def test_min_average_gray(rgb, gray):
    img = ColorImage(np.array(rgb, dtype=np.uint8).reshape(1, 1, 3))
    assert int(min_average_gray(img).pixels[0, 0]) == gray


def test_min_average_gray_formula(rng):
    px = rng.integers(0, 256, size=(6, 5, 3))
    got = min_average_gray(ColorImage(px)).pixels
    for (r, c), v in np.ndenumerate(got):
        lo, mean = px[r, c].min(), px[r, c].mean()
        assert v == int(np.floor((lo + mean) / 2 + 0.5))


def test_otsu_bimodal():
    vals = np.array([10] * 50 + [200] * 50, dtype=np.uint8)
    res = otsu_threshold(GrayImage(vals.reshape(10, 10)))
    assert not res.degenerate
    assert (res.binary.pixels.ravel() == (vals == 10)).all()
    assert res.threshold == 11


def test_otsu_constant():
    res = otsu_threshold(GrayImage(np.full((4, 4), 77)))
    assert res.degenerate and res.threshold == 77
    assert res.binary.object_count == 0


def test_otsu_matches_exhaustive_search(rng):
    for _ in range(8):
        levels = rng.choice(256, size=8, replace=False)
        px = rng.choice(levels, size=(12, 14))
        res = otsu_threshold(GrayImage(px))
        t, _ = otsu_bruteforce(px)
        assert res.threshold == t
        np.testing.assert_array_equal(res.binary.pixels, px < t)


def test_denoise_isolated_pixel():
    arr = np.zeros((5, 5), np.uint8)
    arr[2, 2] = 1
    assert denoise_median3(BinaryImage(arr)).object_count == 0


def test_denoise_fixed_points():
    ones = BinaryImage(np.ones((6, 7)))
    assert denoise_median3(ones) == ones
    zeros = BinaryImage(np.zeros((6, 7)))
    assert denoise_median3(zeros) == zeros


def test_denoise_tie_keeps_original():
    # corner pixel has a 4-pixel window; 2 ones vs 2 zeros is a tie
    arr = np.array([[1, 1, 0], [0, 0, 0], [0, 0, 0]], np.uint8)
    assert denoise_median3(BinaryImage(arr)).pixels[0, 0] == 1
    arr = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], np.uint8)
    assert denoise_median3(BinaryImage(arr)).pixels[0, 0] == 0


def test_denoise_restores_salt_and_pepper():
    rng = np.random.default_rng(5)
    clean = np.zeros((96, 96), np.uint8)
    clean[16:80, 16:80] = 1
    flips = rng.random(clean.shape) < 0.05
    noisy = clean ^ flips
    out = denoise_median3(BinaryImage(noisy)).pixels
    restored = (out[flips] == clean[flips]).mean()
    assert restored >= 0.9


def test_edges_of_square():
    sq = np.zeros((5, 5), np.uint8)
    sq[1:4, 1:4] = 1
    out = extract_edges(BinaryImage(sq)).pixels
    ring = sq.copy()
    ring[2, 2] = 0
    np.testing.assert_array_equal(out, ring)
    assert out.sum() == 8
    assert extract_edges(BinaryImage(sq)) == primitives("ring", 5)


def test_edges_of_line_and_blank():
    line = BinaryImage(np.eye(7))
    assert extract_edges(line) == line
    blank = BinaryImage(np.zeros((4, 4)))
    assert extract_edges(blank) == blank


def test_edges_touching_border():
    ones = BinaryImage(np.ones((4, 4)))
    out = extract_edges(ones).pixels
    assert out.sum() == 12 and out[1:3, 1:3].sum() == 0


@settings(max_examples=60, deadline=None)
@given(binary_arrays)
def test_edges_subset_and_idempotent(arr):
    img = BinaryImage(arr)
    e = extract_edges(img)
    assert not (e.pixels & ~img.pixels.astype(bool)).any()
    ee = extract_edges(e)
    assert extract_edges(ee) == ee


def test_skeleton_bar():
    out = skeletonize(BinaryImage(np.ones((3, 10)))).pixels
    np.testing.assert_array_equal(out, zhang_suen_reference(np.ones((3, 10))))
    rows = np.nonzero(out.any(axis=1))[0]
    assert len(rows) == 1
    cols = np.nonzero(out[rows[0]])[0]
    assert (np.diff(cols) == 1).all() and len(cols) >= 5


def test_skeleton_thin_and_blank():
    diag = BinaryImage(np.eye(8))
    assert skeletonize(diag) == diag
    blank = BinaryImage(np.zeros((5, 5)))
    assert skeletonize(blank) == blank


def test_skeleton_matches_reference(rng):
    for _ in range(10):
        arr = (ndimage.uniform_filter(rng.random((24, 24)), 5) > 0.5).astype(np.uint8)
        np.testing.assert_array_equal(skeletonize(BinaryImage(arr)).pixels, zhang_suen_reference(arr))


@settings(max_examples=40, deadline=None)
@given(binary_arrays)
def test_skeleton_subset_and_idempotent(arr):
    img = BinaryImage(arr)
    sk = skeletonize(img)
    assert not (sk.pixels & ~img.pixels.astype(bool)).any()
    assert skeletonize(sk) == sk


def _components(px):
    return ndimage.label(px, structure=np.ones((3, 3)))[1]


@pytest.mark.parametrize(
    "img",
    [
        sierpinski_triangle(5),
        sierpinski_carpet(3),
        primitives("ring", 9),
        primitives("filled_rect", 9),
        primitives("hline", 8),
    ],
    ids=["triangle5", "carpet3", "ring9", "rect9", "hline8"],
)
def test_skeleton_preserves_components(img):
    assert _components(skeletonize(img).pixels) == _components(img.pixels)
