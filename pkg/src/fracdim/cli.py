"""``fracdim`` command-line front end.

Exit codes: 0 success, 1 input error, 2 degenerate computation, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from . import generators
from .boxcount import FilterConfig, hfd_counts, mhfd_counts
from .errors import ContractViolation, DegenerateError, FracDimError, ManifestError, NetpbmError
from .estimator import (
    SCHEMA_VERSION,
    PipelineOptions,
    apply_preprocessing,
    calibrate,
    compute,
    fit_table,
    to_binary,
)
from .evalharness import load_manifest, report_csv, run_manifest
from .imagecore import read_image, save_netpbm

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_USAGE = 0, 1, 2, 64
DEFAULT_CONFIG = "fracdim.conf"
CONFIG_ENV = "FRACDIM_CONFIG"
PLOT_COLUMNS = (
    "s", "box_size", "inv_box_size", "count", "log_inv_box_size", "log_count", "weight", "model_fit_y",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------- config


def config_path(explicit: str | None = None) -> str:
    return explicit or os.environ.get(CONFIG_ENV) or DEFAULT_CONFIG


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            out[key.strip()] = value.strip()
    return out


def write_config(path: str, values: dict) -> None:
    existing = {}
    if os.path.exists(path):
        existing = read_config(path)
    existing.update(values)
    with open(path, "w") as fh:
        for k, v in existing.items():
            fh.write(f"{k} = {v}\n")


# ---------------------------------------------------------------- parser


def _add_pipeline_args(p):
    p.add_argument("input", help="netpbm image (P1-P6)")
    p.add_argument("--method", choices=("hfd", "mhfd"), default="hfd")
    p.add_argument("--preprocess", default="", help="comma list of denoise,edge,skeleton")
    p.add_argument("--mode", choices=("stochastic", "expected", "expectation"), default="stochastic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--regression", choices=("linear", "deflected"), default="linear")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--c", type=float, dest="c", default=None, help="MHFD normalization factor")
    grp.add_argument("--calibrated", action="store_true", help="read normalization_c from the config file")
    p.add_argument("--invert", action="store_true", help="swap object and background after loading")
    p.add_argument("--config", default=None)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracdim", description="Box-counting fractal dimensions of binary images.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="compute HFD or MHFD of an image")
    _add_pipeline_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("plot-data", help="per-scale table for log-log plots")
    _add_pipeline_args(p)

    p = sub.add_parser("generate", help="write a synthetic image")
    p.add_argument("kind", choices=("sierpinski-triangle", "sierpinski-carpet", "salt-pepper", "filled_rect", "hline", "point", "ring"))
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ascii", action="store_true")
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")

    p = sub.add_parser("calibrate", help="derive and store the MHFD normalization factor")
    p.add_argument("--order", type=int, default=9)
    p.add_argument("--target", type=float, default=generators.TRIANGLE_DIMENSION)
    p.add_argument("--regression", choices=("linear", "deflected"), default="linear")
    p.add_argument("--config", default=None)

    p = sub.add_parser("eval", help="class separability over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--csv", default=None, help="write the summary table here")
    p.add_argument("--images-csv", default=None, help="write the per-image table here")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _options(args) -> PipelineOptions:
    steps = tuple(s.strip() for s in args.preprocess.split(",") if s.strip())
    c = 1.0
    if args.c is not None:
        c = args.c
    elif args.calibrated:
        path = config_path(args.config)
        try:
            c = float(read_config(path)["normalization_c"])
        except (OSError, KeyError, ValueError) as err:
            raise FracDimError(f"cannot read normalization_c from {path}: {err}") from err
    return PipelineOptions(
        preprocess_steps=steps,
        method=args.method,
        filter=FilterConfig(mode=args.mode, seed=args.seed, trials=args.trials),
        regression_model=args.regression,
        normalization_c=c,
        invert_input=args.invert,
    )


def _fmt(v) -> str:
    return "" if v is None else repr(float(v)) if isinstance(v, float) else str(v)


# ---------------------------------------------------------------- commands


def cmd_compute(args, out) -> int:
    opts = _options(args)
    result = compute(read_image(args.input), opts, workers=args.workers)
    if args.format == "json":
        out.write(result.to_json() + "\n")
        return EXIT_OK
    d = result.to_dict()
    cols = ["method", "value", "raw_value", "c", "slope", "intercept", "residual_sum_squares", "points_used", "model", "mode", "seed", "trials"]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(cols)
    w.writerow([_fmt(d[k]) for k in cols])
    return EXIT_OK


def cmd_plot_data(args, out) -> int:
    opts = _options(args)
    img, _ = to_binary(read_image(args.input), opts.invert_input)
    img = apply_preprocessing(img, opts.preprocess_steps)
    if opts.method == "hfd":
        table = hfd_counts(img)
    else:
        table = mhfd_counts(img, opts.filter, workers=args.workers)
    fit, status = None, EXIT_OK
    try:
        fit = fit_table(table, opts.method, opts.regression_model)
    except DegenerateError as err:
        print(f"fracdim: {err}", file=sys.stderr)
        status = EXIT_DEGENERATE
    resolution = fit is not None and fit.model == "deflected"

    w = csv.writer(out, lineterminator="\n")
    w.writerow(PLOT_COLUMNS)
    for e in table:
        x = math.log(2.0 ** -e.s)
        row = [e.s, e.box_size, _fmt(2.0 ** -e.s), _fmt(e.count), _fmt(x), "", "", ""]
        if e.count > 0 and fit is not None:
            row[5] = _fmt(math.log(e.count))
            row[6] = _fmt(2.0 ** -e.s if resolution else 1.0)
            row[7] = _fmt(float(fit.predict(x)))
        elif e.count > 0:
            row[5] = _fmt(math.log(e.count))
        w.writerow(row)
    return status


def cmd_generate(args, out) -> int:
    if args.kind == "sierpinski-triangle":
        img = generators.sierpinski_triangle(args.order)
    elif args.kind == "sierpinski-carpet":
        img = generators.sierpinski_carpet(args.order)
    elif args.kind == "salt-pepper":
        img = generators.salt_pepper(args.width, args.height, args.density, args.seed)
    else:
        img = generators.primitives(args.kind, args.size)
    data = save_netpbm(img, ascii=args.ascii)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        out.flush()
        sys.stdout.buffer.write(data)
    return EXIT_OK


def cmd_calibrate(args, out) -> int:
    c = calibrate(args.order, args.target, regression_model=args.regression)
    path = config_path(args.config)
    write_config(path, {"normalization_c": repr(c)})
    payload = {
        "schema_version": SCHEMA_VERSION,
        "normalization_c": c,
        "reference_order": args.order,
        "target": args.target,
        "regression": args.regression,
        "config": path,
    }
    out.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def cmd_eval(args, out) -> int:
    report = run_manifest(load_manifest(args.manifest), workers=args.workers)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report_csv(report, "summary"))
    if args.images_csv:
        with open(args.images_csv, "w") as fh:
            fh.write(report_csv(report, "images"))
    out.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "plot-data": cmd_plot_data,
    "generate": cmd_generate,
    "calibrate": cmd_calibrate,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    out = sys.stdout
    try:
        return COMMANDS[args.command](args, out)
    except DegenerateError as err:
        print(f"fracdim: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, NetpbmError, ContractViolation, ManifestError, FracDimError) as err:
        print(f"fracdim: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
