"""Class-separability analysis of dimension values.

A manifest is a JSON document of the form::

    {"classes": {"<label>": [{"path": "img.pbm", "options": {...}}, ...], ...}}

``options`` holds :class:`~fracdim.estimator.PipelineOptions` fields (minus
``method``; both methods are always computed). Relative paths resolve
against the manifest's directory.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import FracDimError, ManifestError
from .estimator import SCHEMA_VERSION, PipelineOptions, compute
from .imagecore import read_image

__all__ = ["Separability", "separability", "ClassManifest", "load_manifest", "run_manifest", "report_csv"]

log = logging.getLogger(__name__)

METHODS = ("hfd", "mhfd")


@dataclass(frozen=True)
class Separability:
    intra: float
    inter: float
    ratio: float | None

    @property
    def ratio_defined(self) -> bool:
        return self.ratio is not None

    def to_dict(self):
        return {"intra": self.intra, "inter": self.inter, "ratio": self.ratio, "ratio_defined": self.ratio_defined}


def _mean_pairwise(values) -> float:
    pairs = list(itertools.combinations(values, 2))
    return float(np.mean([abs(a - b) for a, b in pairs]))


def separability(values: dict) -> Separability:
    """Intra-class spread, inter-class distance and their ratio.

    intra is the mean over classes of the mean pairwise absolute difference
    within each class; inter is the mean pairwise distance between class
    means (plain absolute difference for two classes). ``ratio`` is
    ``inter / intra`` and ``None`` when intra is zero.
    """
    if len(values) < 2:
        raise ManifestError(f"need at least 2 classes, got {len(values)}")
    for label, vals in values.items():
        if len(vals) < 2:
            raise ManifestError(f"class {label!r} has {len(vals)} value(s); intra-class distance needs 2")
    labels = sorted(values)
    intra = float(np.mean([_mean_pairwise(values[k]) for k in labels]))
    means = [float(np.mean(values[k])) for k in labels]
    inter = _mean_pairwise(means)
    ratio = inter / intra if intra > 0 else None
    return Separability(intra, inter, ratio)


@dataclass(frozen=True)
class ClassManifest:
    """label -> list of (path, PipelineOptions)."""

    classes: dict

    def __post_init__(self):
        if len(self.classes) < 2:
            raise ManifestError(f"manifest needs at least 2 classes, got {len(self.classes)}")
        for label, entries in self.classes.items():
            if len(entries) < 2:
                raise ManifestError(f"class {label!r} needs at least 2 images")


def load_manifest(source) -> ClassManifest:
    """Parse a manifest from a path or an already-decoded dict."""
    base = ""
    if isinstance(source, (str, os.PathLike)):
        base = os.path.dirname(os.fspath(source))
        try:
            with open(source) as fh:
                source = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ManifestError(f"cannot read manifest: {err}") from err
    if not isinstance(source, dict) or not isinstance(source.get("classes"), dict):
        raise ManifestError("manifest must be an object with a 'classes' mapping")
    classes = {}
    for label, entries in source["classes"].items():
        parsed = []
        for entry in entries:
            if isinstance(entry, str):
                entry = {"path": entry}
            if "path" not in entry:
                raise ManifestError(f"entry in class {label!r} lacks 'path'")
            opts = dict(entry.get("options") or {})
            opts.pop("method", None)
            try:
                options = PipelineOptions.from_dict(opts)
            except (TypeError, ValueError) as err:
                raise ManifestError(f"bad options for {entry['path']!r}: {err}") from err
            parsed.append((os.path.join(base, entry["path"]), options))
        classes[str(label)] = parsed
    return ClassManifest(classes)


def _evaluate(path, options):
    img = read_image(path)
    return {m: compute(img, replace(options, method=m)).value for m in METHODS}


def run_manifest(manifest: ClassManifest, workers: int = 1) -> dict:
    """Compute HFD and MHFD for every image and the separability per method.

    Images that fail to load or compute are listed under ``excluded`` and
    left out; the run fails if any class keeps fewer than 2 images.
    """
    jobs = [(label, path, opts) for label, entries in manifest.classes.items() for path, opts in entries]

    def run(job):
        label, path, opts = job
        try:
            return job, _evaluate(path, opts), None
        except (FracDimError, OSError) as err:
            return job, None, f"{type(err).__name__}: {err}"

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(j) for j in jobs]

    images, excluded = [], []
    values = {m: {label: [] for label in manifest.classes} for m in METHODS}
    for (label, path, _), vals, err in outcomes:
        if err is not None:
            log.warning("excluding %s (%s): %s", path, label, err)
            excluded.append({"class": label, "path": path, "error": err})
            continue
        images.append({"class": label, "path": path, **vals})
        for m in METHODS:
            values[m][label].append(vals[m])

    for label in manifest.classes:
        n = len(values["hfd"][label])
        if n < 2:
            raise ManifestError(f"class {label!r} has only {n} usable image(s) after exclusions")

    return {
        "schema_version": SCHEMA_VERSION,
        "methods": {m: separability(values[m]).to_dict() for m in METHODS},
        "images": images,
        "excluded": excluded,
    }


def _fmt(v):
    return "" if v is None else repr(v)


def report_csv(report: dict, table: str = "summary") -> str:
    """CSV view of a report: ``summary`` (one row per method) or ``images``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if table == "summary":
        w.writerow(["method", "intra", "inter", "ratio"])
        for m, sep in report["methods"].items():
            w.writerow([m, _fmt(sep["intra"]), _fmt(sep["inter"]), _fmt(sep["ratio"])])
    elif table == "images":
        w.writerow(["class", "path", "hfd", "mhfd", "status"])
        for img in report["images"]:
            w.writerow([img["class"], img["path"], _fmt(img["hfd"]), _fmt(img["mhfd"]), "ok"])
        for ex in report["excluded"]:
            w.writerow([ex["class"], ex["path"], "", "", "excluded"])
    else:
        raise ValueError(f"unknown table {table!r}")
    return buf.getvalue()
