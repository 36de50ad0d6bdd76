"""End-to-end HFD and MHFD pipelines, normalization and calibration."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import preprocess as pp
from .boxcount import FilterConfig, ScaleCounts, hfd_counts, mhfd_counts
from .errors import (
    AllScalesFilteredError,
    CalibrationError,
    ContractViolation,
    DegenerateError,
    EmptyObjectError,
    InsufficientDataError,
)
from .generators import TRIANGLE_DIMENSION, sierpinski_triangle
from .imagecore import BinaryImage, ColorImage, GrayImage, invert
from .regression import FitResult, fit_deflected, fit_linear, to_loglog

__all__ = [
    "SCHEMA_VERSION",
    "PREPROCESS_STEPS",
    "PipelineOptions",
    "DimensionResult",
    "to_binary",
    "apply_preprocessing",
    "compute",
    "fit_table",
    "compute_hfd",
    "compute_mhfd",
    "monte_carlo",
    "calibrate",
    "calibration_options",
]

SCHEMA_VERSION = 1
PREPROCESS_STEPS = ("denoise", "edge", "skeleton")
_STEP_FUNCS = {
    "denoise": pp.denoise_median3,
    "edge": pp.extract_edges,
    "skeleton": pp.skeletonize,
}


@dataclass(frozen=True)
class PipelineOptions:
    """Options shared by both pipelines.

    ``preprocess_steps`` may be given in any order; they always run as
    denoise, edge, skeleton. ``normalization_c`` only affects MHFD.
    """

    preprocess_steps: tuple[str, ...] = ()
    method: str = "hfd"
    filter: FilterConfig = field(default_factory=FilterConfig)
    regression_model: str = "linear"
    normalization_c: float = 1.0
    invert_input: bool = False

    def __post_init__(self):
        steps = tuple(self.preprocess_steps)
        unknown = set(steps) - set(PREPROCESS_STEPS)
        if unknown:
            raise ContractViolation(f"unknown preprocessing steps {sorted(unknown)}")
        object.__setattr__(self, "preprocess_steps", tuple(s for s in PREPROCESS_STEPS if s in steps))
        if self.method not in ("hfd", "mhfd"):
            raise ContractViolation(f"unknown method {self.method!r}")
        if self.regression_model not in ("linear", "deflected"):
            raise ContractViolation(f"unknown regression model {self.regression_model!r}")
        if not (self.normalization_c > 0 and math.isfinite(self.normalization_c)):
            raise ContractViolation("normalization_c must be a positive finite number")

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineOptions":
        d = dict(d)
        filt = d.pop("filter", {}) or {}
        if isinstance(filt, dict):
            filt = FilterConfig(**filt)
        if "preprocess_steps" in d:
            d["preprocess_steps"] = tuple(d["preprocess_steps"])
        return cls(filter=filt, **d)


@dataclass(frozen=True)
class DimensionResult:
    method: str
    value: float
    raw_value: float
    normalization_c: float
    fit: FitResult
    scale_table: ScaleCounts
    preprocessing: tuple[str, ...]
    mode: str | None = None
    seed: int | None = None
    trials: int = 1
    trial_mean: float | None = None
    trial_std: float | None = None
    trial_values: tuple[float, ...] = ()
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "method": self.method,
            "value": self.value,
            "raw_value": self.raw_value,
            "c": self.normalization_c,
            "slope": self.fit.slope,
            "intercept": self.fit.intercept,
            "residual_sum_squares": self.fit.residual_sum_squares,
            "points_used": self.fit.points_used,
            "model": self.fit.model,
            "scale_table": [
                {"s": e.s, "box_size": e.box_size, "count": e.count} for e in self.scale_table
            ],
            "preprocessing": list(self.preprocessing),
            "mode": self.mode,
            "seed": self.seed,
            "trials": self.trials,
            "flags": list(self.flags),
        }
        if self.trials > 1:
            d["trial_mean"] = self.trial_mean
            d["trial_std"] = self.trial_std
            d["trial_values"] = list(self.trial_values)
        return d

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def to_binary(image, invert_input: bool = False) -> tuple[BinaryImage, tuple[str, ...]]:
    """Reduce any image kind to a binary one.

    Color goes through the min-average gray transform, gray through Otsu.
    Returns the image and flags describing what happened.
    """
    flags = []
    if isinstance(image, ColorImage):
        image = pp.min_average_gray(image)
        flags.append("min_average_gray")
    if isinstance(image, GrayImage):
        res = pp.otsu_threshold(image)
        image = res.binary
        flags.append(f"otsu_threshold={res.threshold}")
        if res.degenerate:
            flags.append("otsu_degenerate")
    if not isinstance(image, BinaryImage):
        raise TypeError(f"unsupported image type {type(image).__name__}")
    if invert_input:
        image = invert(image)
        flags.append("inverted")
    return image, tuple(flags)


def apply_preprocessing(image: BinaryImage, steps) -> BinaryImage:
    for step in PREPROCESS_STEPS:
        if step in steps:
            image = _STEP_FUNCS[step](image)
    return image


def _context(err: DegenerateError, method: str, steps) -> DegenerateError:
    where = f"{method} [{','.join(steps) or 'no preprocessing'}]"
    out = type(err)(f"{where}: {err}")
    out.__cause__ = err
    return out


def _prepare(image, opts):
    image, flags = to_binary(image, opts.invert_input)
    return apply_preprocessing(image, opts.preprocess_steps), flags


def compute_hfd(image, opts: PipelineOptions | None = None) -> DimensionResult:
    """Classical box-counting dimension: uniform-weight linear log-log fit."""
    opts = opts or PipelineOptions()
    img, flags = _prepare(image, opts)
    try:
        table = hfd_counts(img)
        fit = fit_linear(to_loglog(table, "uniform"))
    except DegenerateError as err:
        raise _context(err, "hfd", opts.preprocess_steps) from err
    return DimensionResult(
        method="hfd",
        value=fit.slope,
        raw_value=fit.slope,
        normalization_c=1.0,
        fit=fit,
        scale_table=table,
        preprocessing=opts.preprocess_steps,
        flags=flags,
    )


def fit_table(table: ScaleCounts, method: str, model: str = "linear") -> FitResult:
    """Fit a scale table the way the given pipeline would."""
    if method == "hfd":
        return fit_linear(to_loglog(table, "uniform"))
    return _fit_mhfd(table, model)


def _fit_mhfd(table: ScaleCounts, model: str) -> FitResult:
    try:
        if model == "deflected":
            return fit_deflected(to_loglog(table, "resolution"))
        return fit_linear(to_loglog(table, "uniform"))
    except InsufficientDataError as err:
        raise AllScalesFilteredError(f"fewer than 2 scales survive the box filters ({err})") from err


def _mhfd_single(img: BinaryImage, opts: PipelineOptions, workers: int = 1):
    table = mhfd_counts(img, opts.filter, workers=workers)
    return table, _fit_mhfd(table, opts.regression_model)


def compute_mhfd(image, opts: PipelineOptions | None = None, workers: int = 1) -> DimensionResult:
    """Modified dimension with background valuation and probabilistic discard.

    In stochastic mode with ``opts.filter.trials > 1`` the reported value is
    the Monte-Carlo mean over seeds ``seed .. seed + trials - 1``; the fit and
    scale table are those of the first seed.
    """
    opts = opts or PipelineOptions(method="mhfd")
    img, flags = _prepare(image, opts)
    cfg = opts.filter
    c = opts.normalization_c
    try:
        table, fit = _mhfd_single(img, opts, workers)
        stats = {}
        if cfg.mode == "stochastic" and cfg.trials > 1:
            raws = _trial_slopes(img, opts, cfg.trials, workers)
            vals = tuple(c * r for r in raws)
            raw = float(np.mean(raws))
            stats = dict(
                trial_mean=float(np.mean(vals)),
                trial_std=float(np.std(vals, ddof=1)),
                trial_values=vals,
            )
        else:
            raw = fit.slope
    except DegenerateError as err:
        raise _context(err, "mhfd", opts.preprocess_steps) from err
    return DimensionResult(
        method="mhfd",
        value=c * raw,
        raw_value=raw,
        normalization_c=c,
        fit=fit,
        scale_table=table,
        preprocessing=opts.preprocess_steps,
        mode=cfg.mode,
        seed=cfg.seed if cfg.mode == "stochastic" else None,
        trials=cfg.trials if cfg.mode == "stochastic" else 1,
        flags=flags,
        **stats,
    )


def compute(image, opts: PipelineOptions, workers: int = 1) -> DimensionResult:
    if opts.method == "hfd":
        return compute_hfd(image, opts)
    return compute_mhfd(image, opts, workers=workers)


def _trial_slopes(img: BinaryImage, opts: PipelineOptions, trials: int, workers: int = 1):
    base = opts.filter.seed

    def one(i):
        cfg = replace(opts.filter, seed=(base + i) % (1 << 64), trials=1)
        return _mhfd_single(img, replace(opts, filter=cfg))[1].slope

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(trials)))
    return [one(i) for i in range(trials)]


def monte_carlo(image, opts: PipelineOptions, trials: int, workers: int = 1):
    """Run the stochastic MHFD with seeds ``seed + 0 .. seed + trials - 1``.

    Returns ``(mean, sample_std, values)`` of the normalized dimension.
    """
    if trials < 2:
        raise ContractViolation("monte_carlo needs trials >= 2")
    if opts.filter.mode != "stochastic":
        raise ContractViolation("monte_carlo requires stochastic filter mode")
    img, _ = _prepare(image, opts)
    try:
        # fail fast on images that cannot produce any estimate
        _mhfd_single(img, opts)
        raws = _trial_slopes(img, opts, trials, workers)
    except DegenerateError as err:
        raise _context(err, "mhfd", opts.preprocess_steps) from err
    values = [opts.normalization_c * r for r in raws]
    return float(np.mean(values)), float(np.std(values, ddof=1)), values


def calibrate(
    reference_order: int = 9,
    target: float = TRIANGLE_DIMENSION,
    regression_model: str = "linear",
) -> float:
    """Normalization factor mapping the raw MHFD of a generated Sierpinski
    triangle (edges extracted, expectation mode) onto ``target``."""
    if reference_order < 6:
        raise ContractViolation("reference_order must be >= 6")
    if not target > 0:
        raise ContractViolation("target must be positive")
    opts = calibration_options(regression_model=regression_model)
    raw = compute_mhfd(sierpinski_triangle(reference_order), opts).raw_value
    if not raw > 0:
        raise CalibrationError(f"raw reference slope {raw} is not positive")
    return target / raw


def calibration_options(normalization_c: float = 1.0, regression_model: str = "linear") -> PipelineOptions:
    """Pipeline used for calibration and for checking a calibrated constant."""
    return PipelineOptions(
        preprocess_steps=("edge",),
        method="mhfd",
        filter=FilterConfig(mode="expectation"),
        regression_model=regression_model,
        normalization_c=normalization_c,
    )
