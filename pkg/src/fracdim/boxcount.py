"""Per-scale box counting.

Classical counts keep every grid-aligned ``2**s`` box that holds at least one
object pixel. Filtered (MHFD) counts additionally drop boxes without any
background pixel and discard the remaining ones with probability
``1 / (n1 + 1)``, where ``n1`` is the box's object-pixel count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, EmptyObjectError
from .imagecore import BinaryImage, build_integral, grid_box_sums, pad_to_pow2

__all__ = [
    "ScaleEntry",
    "ScaleCounts",
    "FilterConfig",
    "hfd_counts",
    "mhfd_counts",
    "keep_probability",
    "uniform",
]

MODES = ("stochastic", "expectation")


@dataclass(frozen=True)
class ScaleEntry:
    s: int
    box_size: int
    count: float


@dataclass(frozen=True)
class ScaleCounts:
    """Ordered table of ``(s, 2**s, count)`` rows, ``s = 0, 1, ...``."""

    entries: tuple[ScaleEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for i, e in enumerate(self.entries):
            if e.s != i or e.box_size != 1 << e.s:
                raise ContractViolation("scale exponents must run 0, 1, 2, ... with box_size = 2**s")
            if e.count < 0:
                raise ContractViolation("counts must be non-negative")

    @classmethod
    def from_counts(cls, counts) -> "ScaleCounts":
        return cls(tuple(ScaleEntry(s, 1 << s, _as_number(c)) for s, c in enumerate(counts)))

    @property
    def scales(self) -> np.ndarray:
        return np.array([e.s for e in self.entries], dtype=np.int64)

    @property
    def counts(self) -> np.ndarray:
        return np.array([e.count for e in self.entries], dtype=np.float64)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def as_pairs(self) -> list[tuple[int, float]]:
        return [(e.s, e.count) for e in self.entries]


def _as_number(c):
    f = float(c)
    return int(f) if f.is_integer() and isinstance(c, (int, np.integer)) else f


@dataclass(frozen=True)
class FilterConfig:
    """How the probabilistic discard is realized.

    ``stochastic`` draws one keyed uniform per box; ``expectation`` replaces
    each draw by its keep probability (deterministic, real-valued counts).
    ``trials`` only matters to the estimator's Monte-Carlo loop.
    """

    mode: str = "stochastic"
    seed: int = 0
    trials: int = 1

    def __post_init__(self):
        mode = {"expected": "expectation"}.get(self.mode, self.mode)
        if mode not in MODES:
            raise ContractViolation(f"unknown filter mode {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if self.trials < 1:
            raise ContractViolation("trials must be >= 1")
        if not 0 <= self.seed < 1 << 64:
            raise ContractViolation("seed must fit in 64 unsigned bits")


# ---------------------------------------------------------------- keyed RNG

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _splitmix(z):
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def _hash_words(*words) -> np.ndarray:
    with np.errstate(over="ignore"):
        h = np.zeros(np.broadcast(*[np.asarray(w) for w in words]).shape, dtype=np.uint64)
        for w in words:
            w = np.asarray(w).astype(np.int64).astype(np.uint64)
            h = _splitmix(h + _GOLDEN + w)
    return h


def uniform(seed, s, box_row, box_col):
    """Counter-based uniform draw in ``[0, 1)`` keyed by ``(seed, s, row, col)``.

    Accepts scalars or broadcastable arrays; a scalar call returns a float.
    The same key always yields the same value, whatever order or thread
    the boxes are visited in.
    """
    seed = np.asarray(seed, dtype=np.uint64)
    h = _hash_words(seed, s, box_row, box_col)
    out = (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- counting


def _scale_limit(image: BinaryImage) -> int:
    """Smallest S with ``2**S >= max(height, width)``."""
    return (max(image.height, image.width) - 1).bit_length()


def hfd_counts(image: BinaryImage) -> ScaleCounts:
    """Occupied-box counts ``N_s`` for ``s = 0 .. S`` on the zero-padded image."""
    if image.object_count == 0:
        raise EmptyObjectError("empty object: image has no object pixels")
    S = _scale_limit(image)
    integral = build_integral(pad_to_pow2(image))
    counts = [int(np.count_nonzero(grid_box_sums(integral, 1 << s))) for s in range(S + 1)]
    return ScaleCounts.from_counts(counts)


def keep_probability(n1, n0):
    """Probability that a box with ``n1`` object and ``n0`` background pixels
    survives the MHFD filters. Vectorized over arrays."""
    n1 = np.asarray(n1)
    n0 = np.asarray(n0)
    if np.any(n1 < 0) or np.any(n0 < 0):
        raise ContractViolation("pixel counts must be non-negative")
    n1f = n1.astype(np.float64)
    p = np.where((n1 > 0) & (n0 > 0), n1f / (n1f + 1.0), 0.0)
    return float(p) if p.ndim == 0 else p


def _in_image(extent: int, w: int, nboxes: int) -> np.ndarray:
    """Per-box overlap length of a tiling by ``w`` with ``[0, extent)``."""
    start = np.arange(nboxes) * w
    return np.clip(np.minimum(start + w, extent) - start, 0, None)


def _filtered_count(integral, s, config, height, width):
    w = 1 << s
    n1 = grid_box_sums(integral, w)
    # padding is neither object nor background: n0 counts in-image zeros only
    inside = np.outer(_in_image(height, w, n1.shape[0]), _in_image(width, w, n1.shape[1]))
    p = keep_probability(n1, inside - n1)
    if config.mode == "expectation":
        return float(p.sum())
    rows, cols = np.indices(n1.shape)
    u = uniform(config.seed, s, rows, cols)
    return int(np.count_nonzero(u < p))


def mhfd_counts(image: BinaryImage, config: FilterConfig | None = None, workers: int = 1) -> ScaleCounts:
    """Filtered box counts for ``s = 0 .. S + 1``.

    The extra top scale is a single box covering a canvas of twice the
    classical side. Only pixels of the original image count as background,
    so padding never makes a saturated box eligible. Zero counts are kept
    in the table.
    ``workers > 1`` spreads the scales over a thread pool; the result does
    not depend on it.
    """
    config = config or FilterConfig()
    if image.object_count == 0:
        raise EmptyObjectError("empty object: image has no object pixels")
    top = _scale_limit(image) + 1
    integral = build_integral(pad_to_pow2(image, side=1 << top))
    h, w = image.height, image.width

    def count(s):
        return _filtered_count(integral, s, config, h, w)

    scales = range(top + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(count, scales))
    else:
        counts = [count(s) for s in scales]
    return ScaleCounts.from_counts(counts)
