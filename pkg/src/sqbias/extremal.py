"""Two- and three-point laws that are extremal for ``L1(X, X_sq) <= E|X|**3``.

For a three-point law on ``x < y <= 0 < z`` with mean 0 and variance
``sigma2`` the objective

    g(x, y, z, sigma2) = L1(X, X_sq) * sigma2 - E|X|**3

is a piecewise quadratic in ``sigma2`` with closed forms on three regions.
The inequality is equivalent to ``sup g = 0``, which :func:`scan_three_point`
confirms on a grid; the supremum is only approached as one atom's weight
vanishes, so a grid plus the two-point limit is used instead of an
optimiser.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .distmodel import DiscreteDist, PreconditionError, abs_moment
from .metrics import l1_distance
from .transforms import square_bias

PARAM_TOL = 1e-12
BOUNDARY_MARGIN = 1e-6


@dataclass(frozen=True)
class TwoPointFamily:
    """Mean 0, variance 1 law with ``P(X = sqrt(q/p)) = p``."""

    p: float

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise PreconditionError("need 0 < p < 1")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def atoms(self) -> tuple[float, float]:
        return (-math.sqrt(self.p / self.q), math.sqrt(self.q / self.p))

    def dist(self) -> DiscreteDist:
        lo, hi = self.atoms
        if lo == -hi:
            return DiscreteDist((lo, hi), (0.5, 0.5))
        return DiscreteDist((lo, hi), (self.q, self.p))


class TwoPointStats(NamedTuple):
    third: float
    abs_third: float
    l1_square: float
    ratio: float


def two_point_stats(p: float) -> TwoPointStats:
    """Closed forms for the two-point family: ``EX**3``, ``E|X|**3``, ``L1(X, X_sq)`` and their ratio."""
    if not 0 < p < 1:
        raise PreconditionError("need 0 < p < 1")
    q = 1.0 - p
    root = math.sqrt(p * q)
    third = (q - p) / root
    abs_third = (p * p + q * q) / root
    l1 = abs(p - q) / root
    ratio = abs(1.0 - 2.0 * p) / (1.0 - 2.0 * p + 2.0 * p * p)
    return TwoPointStats(third, abs_third, l1, ratio)


def sharpness_sequence(eps: float) -> TwoPointFamily:
    """Two-point law with ``L1(X, X_sq) > (1 - eps) E|X|**3``.

    Uses ``p = eps / 4``; any ``p < eps / 2`` works.
    """
    if not 0 < eps < 1:
        raise PreconditionError("need 0 < eps < 1")
    fam = TwoPointFamily(eps / 4.0)
    ratio = two_point_stats(fam.p).ratio
    if not ratio > 1.0 - eps:
        raise ArithmeticError(f"ratio {ratio!r} does not exceed 1 - eps")
    return fam


@dataclass(frozen=True)
class ThreePointConfig:
    """Atoms ``x < y <= 0 < z`` and variance ``sigma2`` of a mean-zero law."""

    x: float
    y: float
    z: float
    sigma2: float

    def __post_init__(self):
        x, y, z, s = self.x, self.y, self.z, self.sigma2
        if not (x < y <= 0 < z):
            raise PreconditionError("need x < y <= 0 < z")
        if not (-y * z < s < -x * z):
            raise PreconditionError("need -yz < sigma2 < -xz")
        p, q, r = self.probs
        if min(p, q, r) <= 0 or abs(p + q + r - 1.0) > PARAM_TOL:
            raise PreconditionError("derived probabilities are not a distribution")

    @property
    def probs(self) -> tuple[float, float, float]:
        x, y, z, s = self.x, self.y, self.z, self.sigma2
        p = (s + y * z) / ((z - x) * (y - x))
        q = -(s + x * z) / ((z - y) * (y - x))
        r = (s + x * y) / ((z - x) * (z - y))
        return p, q, r

    @property
    def case(self) -> int:
        return _case(self.x, self.z, self.sigma2)

    def dist(self) -> DiscreteDist:
        return DiscreteDist((self.x, self.y, self.z), self.probs)


def _case(x, z, s):
    x2, z2 = x * x, z * z
    if s >= max(x2, z2):
        return 0
    if s < min(x2, z2):
        return 1
    if z2 <= s < x2:
        return 2
    return 3


def _g_cases(x, y, z, s):
    """Vectorised closed forms; NaN where ``sigma2 >= max(x**2, z**2)``."""
    x, y, z, s = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z, s)))
    x2, z2 = x * x, z * z
    den = (z - x) * (z - y)
    g1 = -2.0 * (s + x * y) * (y * z2 + s * (z - y)) / den
    g2 = -2.0 * z**3 * (s + x * y) / den
    g3 = 2.0 * (-s * (x2 * (z - y) + y * y * (z - x) + x * y * z) + x * y * z * (x * y - x * z - y * z)) / den
    out = np.full(x.shape, np.nan)
    c1 = s < np.minimum(x2, z2)
    c2 = (z2 <= s) & (s < x2)
    c3 = (x2 <= s) & (s < z2)
    out[c1] = g1[c1]
    out[c2] = g2[c2]
    out[c3] = g3[c3]
    return out


def three_point_g(cfg: ThreePointConfig) -> float:
    """``L1(X, X_sq) sigma2 - E|X|**3`` through the case formulas."""
    if cfg.case == 0:
        raise PreconditionError("dominated region sigma2 >= max(x^2, z^2) is excluded")
    return float(_g_cases(cfg.x, cfg.y, cfg.z, cfg.sigma2))


def three_point_g_definitional(cfg: ThreePointConfig) -> float:
    """Same quantity from the mean-metric distance and exact moments."""
    d = cfg.dist()
    return l1_distance(d, square_bias(d)) * cfg.sigma2 - abs_moment(d, 3)


def vertex_sigma2(x: float, y: float, z: float) -> tuple[float, float]:
    """Vertex of the case-1 parabola and its offset ``sigma*^2 + yz`` (never positive)."""
    vertex = -y * (z * z + x * z - x * y) / (2.0 * (z - y))
    offset = y * (z * (z - x) - y * (2.0 * z - x)) / (2.0 * (z - y))
    return vertex, offset


def g_at_x_squared(x: float, y: float, z: float) -> float:
    """Case-3 formula evaluated at its left end ``sigma2 = x**2``."""
    return -2.0 * x * (x + y) * (x * x * z - y * x * x + y * z * z) / ((z - x) * (z - y))


def dg_dy_at_x_squared(x: float, y: float, z: float) -> float:
    """Closed-form ``d/dy g(x, y, z, x**2)``; negative whenever ``-z < x < y <= 0``."""
    return -2.0 * x * (x + z) * (y * z * (2.0 * z - y) + x * (z - y) ** 2) / ((z - x) * (z - y) ** 2)


@dataclass(frozen=True)
class GridSpec:
    """Axes of the scan.

    ``sigma2_values`` fixes explicit variances; otherwise ``sigma_samples``
    points are spread over the admissible interval of each triple, kept
    ``margin`` inside it.
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    zs: tuple[float, ...]
    sigma_samples: int = 20
    sigma2_values: tuple[float, ...] | None = None
    margin: float = BOUNDARY_MARGIN
    cases: tuple[int, ...] = (1, 2, 3)

    @classmethod
    def uniform(
        cls,
        x_range=(-5.0, -0.1),
        y_range=(-3.0, 0.0),
        z_range=(0.1, 5.0),
        points: int = 20,
        sigma_samples: int = 20,
        cases: Sequence[int] = (1, 2, 3),
    ) -> "GridSpec":
        return cls(
            tuple(np.linspace(*x_range, points)),
            tuple(np.linspace(*y_range, points)),
            tuple(np.linspace(*z_range, points)),
            sigma_samples=sigma_samples,
            cases=tuple(cases),
        )

    def configs(self) -> np.ndarray:
        """Admissible ``(x, y, z, sigma2)`` rows in axis order."""
        X, Y, Z = np.meshgrid(self.xs, self.ys, self.zs, indexing="ij")
        X, Y, Z = X.ravel(), Y.ravel(), Z.ravel()
        ok = (X < Y) & (Y <= 0) & (Z > 0)
        X, Y, Z = X[ok], Y[ok], Z[ok]
        lo = -Y * Z
        hi = np.minimum(-X * Z, np.maximum(X * X, Z * Z))
        if self.sigma2_values is not None:
            S = np.asarray(self.sigma2_values, dtype=float)
            rows = np.column_stack(
                [np.repeat(X, S.size), np.repeat(Y, S.size), np.repeat(Z, S.size), np.tile(S, X.size)]
            )
            keep = (rows[:, 3] > np.repeat(lo, S.size)) & (rows[:, 3] < np.repeat(-X * Z, S.size))
            keep &= rows[:, 3] < np.repeat(np.maximum(X * X, Z * Z), S.size)
            rows = rows[keep]
        else:
            n = self.sigma_samples
            a, b = lo + self.margin, hi - self.margin
            ok = b > a
            frac = np.linspace(0.0, 1.0, n) if n > 1 else np.array([0.0])
            S = a[ok, None] + (b - a)[ok, None] * frac
            rows = np.column_stack(
                [np.repeat(X[ok], frac.size), np.repeat(Y[ok], frac.size), np.repeat(Z[ok], frac.size), S.ravel()]
            )
        if rows.size:
            cases = np.array([_case(x, z, s) for x, _, z, s in rows])
            rows = rows[np.isin(cases, self.cases)]
        return rows


class ScanResult(NamedTuple):
    max_g: float
    argmax: ThreePointConfig
    cells: int

    def to_dict(self) -> dict:
        a = self.argmax
        return {
            "max_g": self.max_g,
            "argmax": {"x": a.x, "y": a.y, "z": a.z, "sigma2": a.sigma2},
            "cells": self.cells,
        }


def scan_three_point(grid: GridSpec | None = None) -> ScanResult:
    """Largest ``g`` over the grid; ties go to the lexicographically smallest config."""
    grid = GridSpec.uniform() if grid is None else grid
    rows = grid.configs()
    if rows.shape[0] == 0:
        raise PreconditionError("grid has no admissible configuration")
    g = _g_cases(rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3])
    best = np.flatnonzero(g == np.nanmax(g))
    order = np.lexsort(rows[best].T[::-1])
    k = best[order[0]]
    x, y, z, s = (float(v) for v in rows[k])
    return ScanResult(float(g[k]), ThreePointConfig(x, y, z, s), int(rows.shape[0]))
