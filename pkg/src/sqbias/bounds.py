"""Bounds on the distance between a characteristic function and the normal one.

All evaluators assume a standardized law (mean 0, variance 1) with third
absolute moment ``beta3 >= 1``.  Integrals with the growing factor
``exp(u**2 / 2)`` are split at every kink of the clamped sines and
integrated with Gauss-Legendre panels; panel widths are halved until two
successive estimates agree to ``tol``.  The scalar :func:`eq9_bound` uses
adaptive Simpson instead, which gives an independent route for the
once-integrated bound.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .charfn import cf_arrays, cf_zero_bias_arrays, check_standardized
from .distmodel import Distribution, PreconditionError, flatten
from .quadrature import adaptive_simpson, gauss_legendre, panels

HALF_PI = math.pi / 2
BETA3_TOL = 1e-12
T_LIMIT = 35.0
_ORDER = 20
_START_WIDTH = 0.25
_MAX_REFINE = 8

Reading = Literal["pointwise", "outer"]


def _check_beta3(beta3: float) -> float:
    if not beta3 >= 1.0 - BETA3_TOL:
        raise PreconditionError(
            f"beta3 = {beta3!r} < 1 is impossible for a standardized law"
        )
    return max(float(beta3), 1.0)


def _check_t(t: np.ndarray) -> np.ndarray:
    t = np.abs(np.atleast_1d(np.asarray(t, dtype=float)))
    if t.size and t.max() > T_LIMIT:
        raise PreconditionError(f"|t| must not exceed {T_LIMIT}")
    return t


def _sin_clamped(x):
    return np.sin(np.minimum(x, HALF_PI))


def power_bound(beta3: float, t: float) -> float:
    return beta3 * abs(t) ** 3 / 6.0


def corollary1_bound(beta3: float, t: float) -> float:
    """``2 sin(min(beta3 |t| / 2, pi / 2))``, a bound on ``|f(t) + f''(t)|``."""
    beta3 = _check_beta3(beta3)
    return 2.0 * math.sin(min(beta3 * abs(t) / 2.0, HALF_PI))


# ---------------------------------------------------------------------------
# integrands
# ---------------------------------------------------------------------------


def _eq9_integrand(beta3, u):
    return 2.0 * _sin_clamped(beta3 * u / 4.0) * u * np.exp(0.5 * u * u)


def _inner_a(beta3, u):
    """``2 int_0^u sin(beta3 s/2 ^ pi/2) ds + u**3/3`` in closed form."""
    u = np.asarray(u, dtype=float)
    knee = math.pi / beta3
    below = (4.0 / beta3) * (1.0 - np.cos(beta3 * np.minimum(u, knee) / 2.0))
    return below + 2.0 * np.maximum(u - knee, 0.0) + u**3 / 3.0


def _inner_b_integrand(beta3, s):
    s2 = s * s
    return (
        2.0 * _sin_clamped(beta3 * s / 2.0)
        + 2.0 * s2 * _sin_clamped(beta3 * s / 4.0)
        + s2
    ) * np.exp(0.5 * s2)


def _kinks(beta3: float, top: float) -> list[float]:
    return [k for k in (math.pi / beta3, 2.0 * math.pi / beta3) if 0.0 < k < top]


# ---------------------------------------------------------------------------
# once-integrated bound
# ---------------------------------------------------------------------------


def eq9_bound(beta3: float, t: float, tol: float = 1e-12) -> float:
    """``2 exp(-t**2/2) int_0^|t| sin(beta3 u/4 ^ pi/2) u exp(u**2/2) du``."""
    beta3 = _check_beta3(beta3)
    (t,) = _check_t([t])
    if t == 0:
        return 0.0

    def scaled(u):
        return 2.0 * math.sin(min(beta3 * u / 4.0, HALF_PI)) * u * math.exp(0.5 * (u * u - t * t))

    pts = [0.0, *_kinks(beta3, t), t]
    return math.fsum(adaptive_simpson(scaled, a, b, tol / len(pts)) for a, b in zip(pts, pts[1:]))


def _panel_curve(integrand, beta3, ts, extra_breaks, width):
    top = float(ts.max())
    breaks = np.unique(np.concatenate([[0.0, top], ts, _kinks(beta3, top), extra_breaks]))
    lo, hi = panels(breaks, width)
    x, w = gauss_legendre(_ORDER)
    half = 0.5 * (hi - lo)
    u = (0.5 * (hi + lo))[:, None] + half[:, None] * x
    cum = np.concatenate([[0.0], np.cumsum((integrand(beta3, u) * w).sum(axis=1) * half)])
    ends = np.concatenate([[0.0], hi])
    idx = np.searchsorted(ends, ts)
    return cum[idx]


def eq9_curve(beta3: float, ts, tol: float = 1e-12) -> np.ndarray:
    """:func:`eq9_bound` on many arguments at once (Gauss-Legendre panels)."""
    beta3 = _check_beta3(beta3)
    ts = _check_t(ts)
    if not ts.any():
        return np.zeros(ts.size)
    width = _START_WIDTH
    prev = None
    for _ in range(_MAX_REFINE):
        cur = np.exp(-0.5 * ts * ts) * _panel_curve(_eq9_integrand, beta3, ts, [], width)
        if prev is not None and np.max(np.abs(cur - prev)) < tol:
            return cur
        prev, width = cur, width / 2
    return cur


# ---------------------------------------------------------------------------
# twice-integrated bound
# ---------------------------------------------------------------------------


@dataclass
class _Cor2Pass:
    lo: np.ndarray
    hi: np.ndarray
    u: np.ndarray
    arm_a: np.ndarray
    arm_b: np.ndarray
    b_lo: np.ndarray
    beta3: float

    def arm_b_at(self, v: float) -> float:
        p = min(max(int(np.searchsorted(self.hi, v)), 0), self.hi.size - 1)
        x, w = gauss_legendre(_ORDER)
        hh = 0.5 * (v - self.lo[p])
        s = self.lo[p] + hh * (x + 1.0)
        return float(self.b_lo[p] + hh * np.dot(w, _inner_b_integrand(self.beta3, s)))

    def gap(self, v: float) -> float:
        return float(_inner_a(self.beta3, v) * math.exp(0.5 * v * v)) - self.arm_b_at(v)


def _cor2_pass(beta3, breaks, width) -> _Cor2Pass:
    lo, hi = panels(breaks, width)
    x, w = gauss_legendre(_ORDER)
    half = 0.5 * (hi - lo)
    u = (0.5 * (hi + lo))[:, None] + half[:, None] * x
    panel_b = (_inner_b_integrand(beta3, u) * w).sum(axis=1) * half
    b_lo = np.concatenate([[0.0], np.cumsum(panel_b)[:-1]])
    hh = 0.5 * (u - lo[:, None])
    s = lo[:, None, None] + hh[:, :, None] * (x + 1.0)
    arm_b = b_lo[:, None] + hh * (_inner_b_integrand(beta3, s) * w).sum(axis=-1)
    arm_a = _inner_a(beta3, u) * np.exp(0.5 * u * u)
    return _Cor2Pass(lo, hi, u, arm_a, arm_b, b_lo, beta3)


def _crossings(ps: _Cor2Pass) -> list[float]:
    """Points where the two arms of the pointwise minimum swap order."""
    nodes = ps.u.reshape(-1)
    d = (ps.arm_a - ps.arm_b).reshape(-1)
    out = []
    flips = np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)
    for k in flips:
        a, b = float(nodes[k]), float(nodes[k + 1])
        try:
            out.append(brentq(ps.gap, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))
        except ValueError:
            out.append(0.5 * (a + b))
    return out


def _cor2_values(beta3, ts, width, crossings, reading):
    top = float(ts.max())
    breaks = np.unique(np.concatenate([[0.0, top], ts, _kinks(beta3, top), crossings]))
    ps = _cor2_pass(beta3, breaks, width)
    _, w = gauss_legendre(_ORDER)
    half = 0.5 * (ps.hi - ps.lo)
    ends = np.concatenate([[0.0], ps.hi])
    idx = np.searchsorted(ends, ts)

    def cumulative(vals):
        return np.concatenate([[0.0], np.cumsum((vals * w).sum(axis=1) * half)])[idx]

    if reading == "pointwise":
        inner = cumulative(np.minimum(ps.arm_a, ps.arm_b))
    elif reading == "outer":
        inner = np.minimum(cumulative(ps.arm_a), cumulative(ps.arm_b))
    else:
        raise ValueError(f"unknown reading {reading!r}")
    return np.exp(-0.5 * ts * ts) * inner, ps


def corollary2_curve(
    beta3: float, ts, tol: float = 1e-12, reading: Reading = "pointwise"
) -> np.ndarray:
    """Twice-integrated bound on ``|f(t) - exp(-t**2/2)|`` at each ``t``.

    ``reading="pointwise"`` takes the minimum of the two inner expressions
    for each ``u`` before the outer integral; ``"outer"`` completes both
    outer integrals first and then takes the minimum (never smaller).
    """
    beta3 = _check_beta3(beta3)
    ts = _check_t(ts)
    if not ts.any():
        return np.zeros(ts.size)
    top = float(ts.max())
    ps = _cor2_pass(beta3, np.unique([0.0, top, *_kinks(beta3, top)]), _START_WIDTH)
    crossings = _crossings(ps)
    width = _START_WIDTH
    prev = None
    for _ in range(_MAX_REFINE):
        cur, _ = _cor2_values(beta3, ts, width, crossings, reading)
        if prev is not None and np.max(np.abs(cur - prev)) < tol:
            return cur
        prev, width = cur, width / 2
    return cur


def corollary2_bound(beta3: float, t: float, tol: float = 1e-12, reading: Reading = "pointwise") -> float:
    return float(corollary2_curve(beta3, [t], tol=tol, reading=reading)[0])


# ---------------------------------------------------------------------------
# leading terms and diagnostics
# ---------------------------------------------------------------------------


def _x_minus_sin(x: float) -> float:
    if abs(x) >= 0.1:
        return x - math.sin(x)
    # x^3/3! - x^5/5! + ...
    term, acc, k = x**3 / 6.0, 0.0, 3
    while abs(term) > 1e-40 * max(abs(acc), 1e-300):
        acc += term
        term *= -x * x / ((k + 1) * (k + 2))
        k += 2
    return acc


def _sin_minus_x_cos(y: float) -> float:
    if abs(y) >= 0.1:
        return math.sin(y) - y * math.cos(y)
    # sum_k (-1)^(k+1) 2k y^(2k+1) / (2k+1)!
    acc = 0.0
    for k in range(1, 12):
        acc += (-1) ** (k + 1) * 2 * k * y ** (2 * k + 1) / math.factorial(2 * k + 1)
    return acc


def compare_leading_terms(beta3: float, t: float) -> tuple[float, float]:
    """Small-``t`` forms ``(twice, once)`` of the twice- and once-integrated bounds.

    Defined for ``0 <= beta3 * t <= pi``.
    """
    if beta3 <= 0 or t < 0 or beta3 * t > math.pi:
        raise PreconditionError("outside stated regime: need 0 <= beta3 * t <= pi")
    twice = 8.0 / beta3**2 * _x_minus_sin(beta3 * t / 2.0)
    once = 32.0 / beta3**2 * _sin_minus_x_cos(beta3 * t / 4.0)
    return twice, once


class Diagnostics(NamedTuple):
    g1: float
    g2: float
    g3: float


def diagnostics_arrays(d: Distribution, s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    f = flatten(d)
    check_standardized(f)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    f0, f1, f2 = cf_arrays(f, s)
    fz = cf_zero_bias_arrays(f, s)
    return np.abs(f0 + f2), np.abs(s) * np.abs(f1), s * s * np.abs(f0 - fz)


def diagnostics_g(d: Distribution, s: float) -> Diagnostics:
    """``g1 = |f + f''|``, ``g2 = s |f'|``, ``g3 = s**2 |f - f_zero_bias|`` at ``s``."""
    g1, g2, g3 = diagnostics_arrays(d, [s])
    return Diagnostics(float(g1[0]), float(g2[0]), float(g3[0]))


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

CSV_HEADER = ("t", "r", "power", "eq9", "cor2", "g1", "cor1")
SLACK_TOL = 1e-9


@dataclass(frozen=True)
class BoundCurve:
    """Values of ``r(t)`` and ``g1(t)`` next to each bound on a grid.

    ``power``, ``eq9`` and ``cor2`` bound ``r``; ``cor1`` bounds ``g1``.
    """

    t_values: np.ndarray
    actual: np.ndarray
    g1: np.ndarray
    bounds: dict[str, np.ndarray] = field(default_factory=dict)
    beta3: float = 1.0

    @property
    def slack(self) -> dict[str, np.ndarray]:
        return {
            name: vals - (self.g1 if name == "cor1" else self.actual)
            for name, vals in self.bounds.items()
        }

    @property
    def min_slack(self) -> float:
        return float(min(s.min() for s in self.slack.values()))

    def holds(self, tol: float = SLACK_TOL) -> bool:
        return self.min_slack >= -tol

    def rows(self):
        cols = [self.t_values, self.actual, self.bounds["power"], self.bounds["eq9"],
                self.bounds["cor2"], self.g1, self.bounds["cor1"]]
        return zip(*cols)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows():
            writer.writerow([f"{float(v):.17g}" for v in row])
        return buf.getvalue()


def bound_curve(
    d: Distribution, t_max: float, steps: int, reading: Reading = "pointwise"
) -> BoundCurve:
    if not t_max > 0 or steps < 1:
        raise PreconditionError("need t_max > 0 and steps >= 1")
    f = flatten(d)
    check_standardized(f)
    beta3 = _check_beta3(f.abs_moment(3))
    ts = np.linspace(0.0, t_max, steps + 1)
    f0, _, f2 = cf_arrays(f, ts)
    r = np.abs(f0 - np.exp(-0.5 * ts * ts))
    g1 = np.abs(f0 + f2)
    bounds = {
        "power": beta3 * ts**3 / 6.0,
        "eq9": eq9_curve(beta3, ts),
        "cor2": corollary2_curve(beta3, ts, reading=reading),
        "cor1": 2.0 * np.sin(np.minimum(beta3 * ts / 2.0, HALF_PI)),
    }
    return BoundCurve(ts, r, g1, bounds, beta3)
