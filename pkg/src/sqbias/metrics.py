"""L1 (Wasserstein-1) distance through the mean metric, and the smoothing bound.

The distance is ``int |F(u) - G(u)| du``.  On the merged grid of atoms and
breakpoints the CDF difference is a polynomial of degree <= 3 per interval;
its real roots inside the interval split it into same-sign pieces that are
integrated exactly.
"""

from __future__ import annotations

import math
from math import fsum

import numpy as np
from numpy.polynomial import polynomial as P

from .distmodel import Distribution, Flat, _antiderivative, _trim_degree, flatten

_ROOT_IMAG_TOL = 1e-9


def _cdf_pieces(f: Flat, grid: np.ndarray) -> np.ndarray:
    """Local polynomials of ``P(X < u)`` on each interval of ``grid``."""
    n = grid.size - 1
    base = f.cdf_right(grid[:-1]) if n else np.zeros(0)
    dens = f.density_on(grid)
    anti = _antiderivative(dens)
    anti[:, 0] += base
    return anti


def _abs_integral(coef: np.ndarray, L: float) -> float:
    c = _trim_degree(coef)[0]
    deg = c.size - 1
    if deg == 0:
        return abs(c[0]) * L
    if deg == 1:
        cuts = [-c[0] / c[1]]
    else:
        roots = P.polyroots(c)
        scale = max(L, 1.0)
        cuts = [r.real for r in roots if abs(r.imag) <= _ROOT_IMAG_TOL * scale]
    pts = sorted({0.0, L, *(x for x in cuts if 0.0 < x < L)})
    anti = np.concatenate([[0.0], c / np.arange(1, c.size + 1)])
    vals = [P.polyval(x, anti) for x in pts]
    return fsum(abs(b - a) for a, b in zip(vals, vals[1:]))


def l1_distance(a: Distribution, b: Distribution) -> float:
    """``int |P(X < u) - P(Y < u)| du`` computed piece by piece."""
    fa, fb = flatten(a), flatten(b)
    grid = np.unique(np.concatenate([fa.grid(), fb.grid()]))
    if grid.size < 2:
        return 0.0
    diff = _cdf_pieces(fa, grid)
    other = _cdf_pieces(fb, grid)
    width = max(diff.shape[1], other.shape[1])
    diff = np.pad(diff, ((0, 0), (0, width - diff.shape[1])))
    diff[:, : other.shape[1]] -= other
    widths = np.diff(grid)
    if width == 1 or not np.any(diff[:, 1:]):
        return fsum(np.abs(diff[:, 0]) * widths)
    return fsum(_abs_integral(row[None, :], L) for row, L in zip(diff, widths))


def cf_distance_bound(l1: float, t: float) -> float:
    """Smoothing bound ``2 sin(min(|t| l1 / 2, pi / 2))`` on ``|f_X(t) - f_Y(t)|``."""
    if l1 < 0:
        raise ValueError("l1 must be nonnegative")
    return 2.0 * math.sin(min(abs(t) * l1 / 2.0, math.pi / 2.0))


def sup_cdf_difference(a: Distribution, b: Distribution, grid) -> float:
    """Largest ``|F(u) - G(u)|`` over the supplied points."""
    grid = np.asarray(grid, dtype=float)
    return float(np.max(np.abs(flatten(a).cdf(grid) - flatten(b).cdf(grid))))

