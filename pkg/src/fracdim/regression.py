"""Least-squares extraction of the dimension from log-log scale data.

Two models are supported, both linear in their parameters and solved by
weighted normal equations:

* ``linear``:     ``log N = D * x + h``
* ``deflected``:  ``log N = D * x / (exp(x) + 0.9) + h``

with ``x = log(1 / 2**s)``, so ``exp(x)`` is the box-per-pixel resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boxcount import ScaleCounts
from .errors import ContractViolation, DegenerateDesignError, InsufficientDataError

__all__ = [
    "LogLogPoint",
    "FitResult",
    "DEFLECTION_OFFSET",
    "to_loglog",
    "fit_linear",
    "fit_deflected",
    "deflected_regressor",
    "weighted_rss",
]

DEFLECTION_OFFSET = 0.9
WEIGHTINGS = ("uniform", "resolution")


@dataclass(frozen=True)
class LogLogPoint:
    x: float
    y: float
    weight: float = 1.0

    def __post_init__(self):
        if not self.weight >= 0:
            raise ContractViolation(f"weight must be non-negative, got {self.weight}")
        if not math.isfinite(self.y):
            raise ContractViolation("log-count must be finite")

    @property
    def s(self) -> float:
        """Scale exponent recovered from ``x = -s * log 2``."""
        return -self.x / math.log(2.0)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_sum_squares: float
    points_used: int
    model: str

    def predict(self, x):
        x = np.asarray(x, dtype=np.float64)
        u = deflected_regressor(x) if self.model == "deflected" else x
        return self.slope * u + self.intercept


def to_loglog(counts: ScaleCounts, weighting: str = "uniform") -> list[LogLogPoint]:
    """Natural-log points for every nonzero count.

    ``weighting="resolution"`` gives each point the weight ``1 / 2**s``.
    """
    if weighting not in WEIGHTINGS:
        raise ContractViolation(f"unknown weighting {weighting!r}")
    pts = []
    for e in counts:
        if e.count <= 0:
            continue
        w = 1.0 if weighting == "uniform" else 2.0 ** -e.s
        pts.append(LogLogPoint(-e.s * math.log(2.0), math.log(e.count), w))
    if len(pts) < 2:
        raise InsufficientDataError(f"need at least 2 nonzero scales, got {len(pts)}")
    return pts


def _arrays(points: Sequence[LogLogPoint]):
    x = np.array([p.x for p in points], dtype=np.float64)
    y = np.array([p.y for p in points], dtype=np.float64)
    w = np.array([p.weight for p in points], dtype=np.float64)
    return x, y, w


def deflected_regressor(x):
    """Transformed regressor ``x / (exp(x) + 0.9)``."""
    x = np.asarray(x, dtype=np.float64)
    return x / (np.exp(x) + DEFLECTION_OFFSET)


def weighted_rss(u, y, w, slope, intercept) -> float:
    r = np.asarray(y) - (slope * np.asarray(u) + intercept)
    return float(np.sum(np.asarray(w) * r * r))


def _wls(u, y, w, model):
    if u.size < 2:
        raise InsufficientDataError(f"need at least 2 points, got {u.size}")
    active = w > 0
    if np.count_nonzero(active) < 2:
        raise DegenerateDesignError("fewer than 2 points carry positive weight")
    sw = w.sum()
    ubar = np.dot(w, u) / sw
    ybar = np.dot(w, y) / sw
    du = u - ubar
    sxx = np.dot(w, du * du)
    scale = max(1.0, float(np.max(np.abs(u[active]))))
    if sxx <= (1e-12 * scale) ** 2 * sw:
        raise DegenerateDesignError("regressor values are (numerically) identical")
    slope = float(np.dot(w, du * (y - ybar)) / sxx)
    intercept = float(ybar - slope * ubar)
    rss = weighted_rss(u, y, w, slope, intercept)
    return FitResult(slope, intercept, rss, int(u.size), model)


def fit_linear(points: Sequence[LogLogPoint]) -> FitResult:
    """Weighted least squares for ``y = D * x + h`` using the point weights."""
    x, y, w = _arrays(points)
    return _wls(x, y, w, "linear")


def fit_deflected(points: Sequence[LogLogPoint]) -> FitResult:
    """Weighted least squares for the deflection-corrected model.

    Callers normally pass points built with ``weighting="resolution"``; the
    weights on the points are used as given.
    """
    x, y, w = _arrays(points)
    return _wls(deflected_regressor(x), y, w, "deflected")
