"""Command-line entry point.

Exit codes: 0 success, 2 bad usage or precondition, 3 a checked inequality
or identity failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import jsonio
from .bounds import bound_curve
from .distmodel import standardize
from .extremal import GridSpec, scan_three_point
from .metrics import l1_distance
from .transforms import (
    double_size_bias,
    size_bias,
    square_bias,
    uniform_product_square_bias,
    zero_bias,
)
from .verify import DEFAULT_SEED, SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 2, 3

TRANSFORMS = {
    "size": size_bias,
    "zero": zero_bias,
    "square": square_bias,
    "double-size": double_size_bias,
    "uprod": uniform_product_square_bias,
}


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_transform(args) -> int:
    out = TRANSFORMS[args.kind](jsonio.load(args.dist))
    _emit(jsonio.dumps(out) + "\n", args.out)
    return EXIT_OK


def cmd_metric(args) -> int:
    print(f"{l1_distance(jsonio.load(args.a), jsonio.load(args.b)):.17g}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    d = jsonio.load(args.dist)
    if args.standardize:
        d = standardize(d)
    curve = bound_curve(d, args.tmax, args.steps, reading=args.cor2_reading)
    _emit(curve.to_csv(), args.out)
    if not curve.holds():
        worst = {k: float(v.min()) for k, v in curve.slack.items()}
        print(f"bound violated: min slacks {worst}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.seed, args.count)
    print(json.dumps(report.to_dict()))
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_extremal_scan(args) -> int:
    grid = GridSpec.uniform(
        x_range=tuple(args.x_range),
        y_range=tuple(args.y_range),
        z_range=tuple(args.z_range),
        points=args.points,
        sigma_samples=args.sigma_samples,
        cases=args.cases,
    )
    res = scan_three_point(grid)
    _emit(json.dumps(res.to_dict()) + "\n", args.out)
    return EXIT_OK if res.max_g <= 1e-9 else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqbias", description="Size, zero and square bias transformations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="apply a transformation to a distribution file")
    t.add_argument("dist")
    t.add_argument("--kind", required=True, choices=sorted(TRANSFORMS))
    t.add_argument("--out")
    t.set_defaults(func=cmd_transform)

    m = sub.add_parser("metric", help="print the L1 distance between two distribution files")
    m.add_argument("a")
    m.add_argument("b")
    m.set_defaults(func=cmd_metric)

    b = sub.add_parser("bounds", help="write the bound curves of a standardized law as CSV")
    b.add_argument("dist")
    b.add_argument("--tmax", type=float, required=True)
    b.add_argument("--steps", type=int, default=30)
    b.add_argument("--out")
    b.add_argument("--standardize", action="store_true")
    b.add_argument("--cor2-reading", choices=["pointwise", "outer"], default="pointwise")
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="run a seeded invariant suite")
    v.add_argument("--suite", required=True, choices=sorted(SUITES))
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--count", type=int)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("extremal-scan", help="grid search for the three-point objective")
    e.add_argument("--points", type=int, default=20)
    e.add_argument("--sigma-samples", type=int, default=20)
    e.add_argument("--x-range", type=float, nargs=2, default=(-5.0, -0.1))
    e.add_argument("--y-range", type=float, nargs=2, default=(-3.0, 0.0))
    e.add_argument("--z-range", type=float, nargs=2, default=(0.1, 5.0))
    e.add_argument("--cases", type=int, nargs="+", choices=[1, 2, 3], default=[1, 2, 3])
    e.add_argument("--out")
    e.set_defaults(func=cmd_extremal_scan)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "count", None) is not None and args.count < 1:
        print("error: --count must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
