"""Seeded invariant suites.

Each suite draws ``count`` random laws from a SplitMix64 stream and reduces
one scalar per law to ``max_violation``.  For inequalities the scalar is
``lhs - rhs`` (negative means slack); for identities it is the error.  A
suite passes when ``max_violation <= tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import jsonio
from .bounds import SLACK_TOL, bound_curve
from .charfn import cf_arrays, cf_size_bias_arrays, cf_square_bias_arrays, cf_zero_bias_arrays
from .distmodel import DiscreteDist, Distribution, abs_moment, raw_moment, rademacher
from .extremal import scan_three_point
from .metrics import cf_distance_bound, l1_distance, sup_cdf_difference
from .rng import (
    SplitMix64,
    random_mean_zero,
    random_nonnegative,
    random_standardized,
    random_symmetric_standardized,
)
from .transforms import (
    size_bias,
    square_bias,
    sum_law,
    uniform_product_square_bias,
    zero_bias,
    zero_bias_decomposition,
)

DEFAULT_SEED = 42
T_GRID = np.linspace(0.0, 5.0, 51)


@dataclass
class SuiteReport:
    suite: str
    count: int
    max_violation: float
    tol: float
    counterexample: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self) -> dict:
        out = {"suite": self.suite, "count": self.count, "max_violation": self.max_violation}
        out.update(self.extra)
        if not self.passed and self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _reduce(name: str, tol: float, cases: Iterator[tuple[float, Callable[[], dict]]]) -> SuiteReport:
    """Keep the worst value; remember the first case that exceeds ``tol``."""
    worst, n, first_bad = -math.inf, 0, None
    for value, describe in cases:
        n += 1
        worst = max(worst, value)
        if first_bad is None and value > tol:
            first_bad = describe()
    return SuiteReport(name, n, float(worst), tol, first_bad)


def _law(d: Distribution, **info) -> Callable[[], dict]:
    return lambda: {"dist": jsonio.to_dict(d), **info}


def _rel(a: float, b: float, scale: float) -> float:
    return abs(a - b) / scale


def suite_moments(seed: int, count: int) -> SuiteReport:
    """Zero-bias raw moments and square-bias absolute moments.

    Errors are relative to the absolute moment of matching order, which
    keeps the ratio meaningful when an odd moment is near zero.
    """
    rng = SplitMix64(seed)

    def cases():
        for _ in range(count):
            d = random_standardized(rng)
            zb, sb = zero_bias(d), square_bias(d)
            errs = [
                _rel(raw_moment(zb, n), raw_moment(d, n + 2) / (n + 1), abs_moment(d, n + 2) / (n + 1))
                for n in (1, 2, 3)
            ]
            errs += [_rel(abs_moment(sb, r), abs_moment(d, r + 2), abs_moment(d, r + 2)) for r in (0.5, 1.0, 2.5)]
            yield max(errs), _law(d, errors=errs)

    return _reduce("moments", 1e-10, cases())


def suite_fixed_points(seed: int, count: int) -> SuiteReport:
    """Symmetric two-point laws are returned bitwise by ``square_bias`` (at least the three fixed scales)."""
    rng = SplitMix64(seed)
    sigmas = [0.5, 1.0, 3.0] + [rng.uniform(0.01, 10.0) for _ in range(max(count - 3, 0))]

    def cases():
        for s in sigmas:
            d = rademacher(s)
            out = square_bias(d)
            same = isinstance(out, DiscreteDist) and out.atoms == d.atoms and out.probs == d.probs
            yield (0.0 if same else 1.0), _law(d, output=jsonio.to_dict(out))

    return _reduce("fixed-points", 0.0, cases())


def suite_theorem1(seed: int, count: int) -> SuiteReport:
    """``L1(X, X_sq) <= E|X|**3``."""
    rng = SplitMix64(seed)

    def cases():
        for _ in range(count):
            d = random_standardized(rng)
            l1, b3 = l1_distance(d, square_bias(d)), abs_moment(d, 3)
            yield l1 - b3, _law(d, l1=l1, beta3=b3)

    return _reduce("theorem1", 1e-9, cases())


def suite_eq3(seed: int, count: int) -> SuiteReport:
    """``L1(X, X_zero) <= E|X|**3 / 2``."""
    rng = SplitMix64(seed)

    def cases():
        for _ in range(count):
            d = random_standardized(rng)
            l1, b3 = l1_distance(d, zero_bias(d)), abs_moment(d, 3)
            yield l1 - b3 / 2.0, _law(d, l1=l1, beta3=b3)

    return _reduce("eq3", 1e-10, cases())


def bound_slack(d: Distribution, ts=T_GRID) -> tuple[float, dict]:
    """Most negative slack over all curve bounds and the smoothing inequality for ``(X, X_sq)``."""
    curve = bound_curve(d, float(ts[-1]), len(ts) - 1)
    l1 = l1_distance(d, square_bias(d))
    smoothing = np.array([cf_distance_bound(l1, t) for t in curve.t_values]) - curve.g1
    slacks = {k: float(v.min()) for k, v in curve.slack.items()}
    slacks["eq8"] = float(smoothing.min())
    return min(slacks.values()), slacks


def suite_eq8(seed: int, count: int) -> SuiteReport:
    """Every bound on ``[0, 5]`` for random standardized laws; value is ``-min slack``."""
    rng = SplitMix64(seed)

    def cases():
        for _ in range(count):
            d = random_standardized(rng)
            worst, slacks = bound_slack(d)
            yield -worst, _law(d, slacks=slacks)

    return _reduce("eq8", SLACK_TOL, cases())


def suite_cf_consistency(seed: int, count: int) -> SuiteReport:
    """Transformed-law ch.f. against the derivative formulas on ``[-5, 5]``."""
    rng = SplitMix64(seed)
    ts = np.linspace(-5.0, 5.0, 41)

    def err(law, fn, direct):
        return float(np.max(np.abs(cf_arrays(law, ts)[0] - fn(direct, ts))))

    def cases():
        for _ in range(count):
            d = random_standardized(rng)
            nn = random_nonnegative(rng)
            errs = {
                "size": err(size_bias(nn), cf_size_bias_arrays, nn),
                "square": err(square_bias(d), cf_square_bias_arrays, d),
                "zero": err(zero_bias(d), cf_zero_bias_arrays, d),
            }
            yield max(errs.values()), _law(d, nonnegative=jsonio.to_dict(nn), errors=errs)

    return _reduce("cf-consistency", 1e-10, cases())


def _sup_grid(a: Distribution, b: Distribution, lo: float, hi: float) -> float:
    return sup_cdf_difference(a, b, np.linspace(lo, hi, 1001))


def suite_decomposition(seed: int, count: int) -> SuiteReport:
    """Zero bias of a sum against the variance-weighted mixture; includes two Rademachers."""
    rng = SplitMix64(seed)

    def cases():
        for k in range(count):
            if k == 0:
                parts = [rademacher(1.0), rademacher(1.0)]
            else:
                parts = [random_mean_zero(rng) for _ in range(rng.randint(2, 4))]
            direct = zero_bias(sum_law(parts))
            mixed = zero_bias_decomposition(parts)
            span = sum(max(abs(a) for a in p.atoms) for p in parts)
            yield _sup_grid(direct, mixed, -span - 1, span + 1), lambda p=parts: {
                "summands": [jsonio.to_dict(x) for x in p]
            }

    return _reduce("decomposition", 1e-10, cases())


def suite_uprod(seed: int, count: int) -> SuiteReport:
    """``U X_sq`` against ``X_zero`` for symmetric laws."""
    rng = SplitMix64(seed)

    def cases():
        for _ in range(count):
            d = random_symmetric_standardized(rng)
            r = max(abs(a) for a in d.atoms)
            yield _sup_grid(uniform_product_square_bias(d), zero_bias(d), -r - 0.5, r + 0.5), _law(d)

    return _reduce("uprod", 1e-12, cases())


def suite_extremal(seed: int, count: int) -> SuiteReport:
    """Default three-point grid; seed and count are unused."""
    res = scan_three_point()
    rep = _reduce("extremal", 1e-9, iter([(res.max_g, lambda: res.to_dict())]))
    rep.count = res.cells
    rep.extra = {"max_g": res.max_g, "argmax": res.to_dict()["argmax"]}
    return rep


SUITES: dict[str, tuple[Callable[[int, int], SuiteReport], int]] = {
    "moments": (suite_moments, 500),
    "fixed-points": (suite_fixed_points, 3),
    "theorem1": (suite_theorem1, 500),
    "eq3": (suite_eq3, 200),
    "eq8": (suite_eq8, 200),
    "cf-consistency": (suite_cf_consistency, 50),
    "decomposition": (suite_decomposition, 50),
    "uprod": (suite_uprod, 100),
    "extremal": (suite_extremal, 1),
}


def run_suite(name: str, seed: int = DEFAULT_SEED, count: int | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    fn, default = SUITES[name]
    return fn(seed, default if count is None else count)
