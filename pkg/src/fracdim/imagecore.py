"""Image containers, netpbm I/O, padding and the integral image.

Images are thin immutable wrappers around numpy arrays indexed ``[row, col]``.
For binary images 1 is always the object pixel.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NetpbmError

__all__ = [
    "BinaryImage",
    "GrayImage",
    "ColorImage",
    "IntegralImage",
    "load_netpbm",
    "save_netpbm",
    "read_image",
    "write_image",
    "invert",
    "pad_to_pow2",
    "build_integral",
    "box_sum",
]


def _frozen(arr, dtype):
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


class _Image:
    pixels: np.ndarray

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def shape(self):
        return self.pixels.shape

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.pixels.shape, self.pixels.tobytes()))


@dataclass(frozen=True, eq=False)
class BinaryImage(_Image):
    """Rectangular grid of {0, 1} pixels, 1 = object."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ContractViolation(f"binary image must be a non-empty 2-D grid, got shape {arr.shape}")
        if arr.dtype == bool:
            arr = arr.astype(np.uint8)
        elif not np.isin(arr, (0, 1)).all():
            raise ContractViolation("binary image pixels must be 0 or 1")
        object.__setattr__(self, "pixels", _frozen(arr, np.uint8))

    @property
    def object_count(self) -> int:
        return int(self.pixels.sum(dtype=np.int64))


@dataclass(frozen=True, eq=False)
class GrayImage(_Image):
    """8-bit gray image."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ContractViolation(f"gray image must be a non-empty 2-D grid, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ContractViolation("gray intensities must lie in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(arr, np.uint8))


@dataclass(frozen=True, eq=False)
class ColorImage(_Image):
    """8-bit RGB image, ``pixels`` has shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ContractViolation(f"color image must have shape (h, w, 3), got {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ContractViolation("color channels must lie in [0, 255]")
        object.__setattr__(self, "pixels", _frozen(arr, np.uint8))


@dataclass(frozen=True, eq=False)
class IntegralImage:
    """Summed-area table of a binary image.

    ``table[r, c]`` is the number of object pixels in rows ``[0, r)`` and
    columns ``[0, c)``; the table has shape ``(height + 1, width + 1)``.
    """

    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", _frozen(self.table, np.int64))

    @property
    def height(self) -> int:
        return int(self.table.shape[0]) - 1

    @property
    def width(self) -> int:
        return int(self.table.shape[1]) - 1

    @property
    def total(self) -> int:
        return int(self.table[-1, -1])

    def __eq__(self, other):
        if not isinstance(other, IntegralImage):
            return NotImplemented
        return bool(np.array_equal(self.table, other.table))

    __hash__ = None


# ---------------------------------------------------------------- netpbm

_MAGICS = {b"P1", b"P2", b"P3", b"P4", b"P5", b"P6"}
_WS = b" \t\n\r\v\f"


class _HeaderReader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 2

    def skip_ws(self):
        data = self.data
        while self.pos < len(data):
            ch = data[self.pos : self.pos + 1]
            if ch == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            elif ch in _WS:
                self.pos += 1
            else:
                break

    def integer(self, what: str) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1].isdigit():
            self.pos += 1
        if start == self.pos:
            if self.pos >= len(self.data):
                raise NetpbmError(f"truncated header: missing {what}", self.pos)
            raise NetpbmError(f"expected integer {what}", self.pos)
        return int(self.data[start : self.pos])


def load_netpbm(data: bytes, *, black_is_object: bool = True):
    """Decode a netpbm P1-P6 byte string.

    PBM files store 1 for black; with ``black_is_object`` (the default) a
    black pixel becomes object pixel 1. Gray/color files with a maxval below
    255 are rescaled to the full 8-bit range.

    Raises
    ------
    NetpbmError
        On unknown magic, malformed header, truncated raster or maxval > 255.
    """
    data = bytes(data)
    magic = data[:2]
    if magic not in _MAGICS:
        raise NetpbmError(f"unsupported netpbm format {magic!r}", 0)
    kind = int(magic[1:2])
    hdr = _HeaderReader(data)
    width = hdr.integer("width")
    height = hdr.integer("height")
    if width < 1 or height < 1:
        raise NetpbmError(f"invalid dimensions {width}x{height}", hdr.pos)
    maxval = 1
    if kind not in (1, 4):
        maxval = hdr.integer("maxval")
        if maxval < 1 or maxval > 255:
            raise NetpbmError(f"unsupported maxval {maxval}", hdr.pos)
    channels = 3 if kind in (3, 6) else 1
    count = width * height * channels

    if kind in (1, 2, 3):
        values = _ascii_raster(data, hdr, count, bitwise=(kind == 1))
    else:
        if hdr.pos >= len(data) or data[hdr.pos : hdr.pos + 1] not in _WS:
            raise NetpbmError("expected single whitespace before raster", hdr.pos)
        start = hdr.pos + 1
        if kind == 4:
            row_bytes = (width + 7) // 8
            need = row_bytes * height
            raw = data[start : start + need]
            if len(raw) < need:
                raise NetpbmError(f"truncated raster: need {need} bytes, got {len(raw)}", start + len(raw))
            bits = np.unpackbits(np.frombuffer(raw, np.uint8).reshape(height, row_bytes), axis=1)
            values = bits[:, :width]
        else:
            raw = data[start : start + count]
            if len(raw) < count:
                raise NetpbmError(f"truncated raster: need {count} bytes, got {len(raw)}", start + len(raw))
            values = np.frombuffer(raw, np.uint8)
    values = np.asarray(values)

    if kind in (1, 4):
        arr = values.reshape(height, width).astype(np.uint8)
        if not black_is_object:
            arr = 1 - arr
        return BinaryImage(arr)
    if np.any(values > maxval):
        raise NetpbmError(f"sample exceeds maxval {maxval}", hdr.pos)
    if maxval != 255:
        values = (values.astype(np.int64) * 255 * 2 + maxval) // (2 * maxval)
    if channels == 1:
        return GrayImage(values.reshape(height, width))
    return ColorImage(values.reshape(height, width, 3))


_P1_TOKEN = re.compile(rb"#[^\n]*|\s+|[01]|.", re.S)
_PLAIN_TOKEN = re.compile(rb"#[^\n]*|\s+|\d+|.", re.S)


def _ascii_raster(data, hdr, count, bitwise):
    pattern = _P1_TOKEN if bitwise else _PLAIN_TOKEN
    out = np.empty(count, dtype=np.int64)
    n = 0
    for m in pattern.finditer(data, hdr.pos):
        if n == count:
            break
        tok = m.group()
        if tok[:1] == b"#" or tok[:1] in _WS:
            continue
        if not tok.isdigit():
            raise NetpbmError(f"unexpected byte {tok!r} in raster", m.start())
        out[n] = int(tok)
        n += 1
    if n < count:
        raise NetpbmError(f"truncated raster: expected {count} samples, got {n}", len(data))
    return out


def save_netpbm(image, ascii: bool = False, *, black_is_object: bool = True) -> bytes:
    """Encode an image as PBM/PGM/PPM (maxval 255 for gray and color)."""
    h, w = image.height, image.width
    if isinstance(image, BinaryImage):
        arr = image.pixels if black_is_object else 1 - image.pixels
        if ascii:
            lines = [" ".join(str(int(v)) for v in row) for row in arr]
            return f"P1\n{w} {h}\n".encode() + "\n".join(lines).encode() + b"\n"
        return f"P4\n{w} {h}\n".encode() + np.packbits(arr.astype(np.uint8), axis=1).tobytes()
    if isinstance(image, GrayImage):
        if ascii:
            lines = [" ".join(str(int(v)) for v in row) for row in image.pixels]
            return f"P2\n{w} {h}\n255\n".encode() + "\n".join(lines).encode() + b"\n"
        return f"P5\n{w} {h}\n255\n".encode() + image.pixels.tobytes()
    if isinstance(image, ColorImage):
        if ascii:
            lines = [" ".join(str(int(v)) for v in row.ravel()) for row in image.pixels]
            return f"P3\n{w} {h}\n255\n".encode() + "\n".join(lines).encode() + b"\n"
        return f"P6\n{w} {h}\n255\n".encode() + image.pixels.tobytes()
    raise TypeError(f"cannot encode {type(image).__name__} as netpbm")


def read_image(path, *, black_is_object: bool = True):
    with open(path, "rb") as fh:
        return load_netpbm(fh.read(), black_is_object=black_is_object)


def write_image(path, image, ascii: bool = False):
    with open(path, "wb") as fh:
        fh.write(save_netpbm(image, ascii=ascii))


# ---------------------------------------------------------------- utilities


def invert(image: BinaryImage) -> BinaryImage:
    """Swap object and background (BW01 <-> BW10)."""
    return BinaryImage(1 - image.pixels)


def _pow2_at_least(n: int) -> int:
    return 1 << max(0, (int(n) - 1).bit_length())


def pad_to_pow2(image: BinaryImage, side: int | None = None) -> BinaryImage:
    """Zero-pad to a ``W x W`` square, ``W = 2**ceil(log2(max(h, w)))``.

    ``side`` forces a larger power-of-two canvas. Content stays at the
    top-left corner.
    """
    need = _pow2_at_least(max(image.height, image.width))
    if side is None:
        side = need
    elif side < need or side & (side - 1):
        raise ContractViolation(f"side {side} must be a power of two >= {need}")
    if image.height == side and image.width == side:
        return image
    out = np.zeros((side, side), dtype=np.uint8)
    out[: image.height, : image.width] = image.pixels
    return BinaryImage(out)


def build_integral(image: BinaryImage) -> IntegralImage:
    table = np.zeros((image.height + 1, image.width + 1), dtype=np.int64)
    np.cumsum(np.cumsum(image.pixels, axis=0, dtype=np.int64), axis=1, out=table[1:, 1:])
    return IntegralImage(table)


def box_sum(integral: IntegralImage, row: int, col: int, w: int) -> int:
    """Object-pixel count of the ``w x w`` box with top-left corner ``(row, col)``."""
    if w < 1 or row < 0 or col < 0 or row + w > integral.height or col + w > integral.width:
        raise ContractViolation(
            f"box ({row}, {col}, {w}) outside {integral.height}x{integral.width} image"
        )
    t = integral.table
    return int(t[row + w, col + w] - t[row, col + w] - t[row + w, col] + t[row, col])


def grid_box_sums(integral: IntegralImage, w: int) -> np.ndarray:
    """Object counts of every grid-aligned ``w x w`` box, as a 2-D array.

    The image size must be a multiple of ``w`` in both directions.
    """
    if integral.height % w or integral.width % w:
        raise ContractViolation(f"box width {w} does not tile {integral.height}x{integral.width}")
    t = integral.table[::w, ::w]
    return t[1:, 1:] - t[:-1, 1:] - t[1:, :-1] + t[:-1, :-1]
