"""Quadrature rules used by the bound evaluators."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import numpy as np


def adaptive_simpson(
    fn: Callable[[float], float], a: float, b: float, tol: float = 1e-12, max_depth: int = 60
) -> float:
    """Adaptive Simpson with Richardson correction (explicit stack, no recursion)."""
    if a == b:
        return 0.0
    fa, fm, fb = fn(a), fn(0.5 * (a + b)), fn(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = fn(lm), fn(rm)
        left = (mid - lo) * (flo + 4 * flm + fmid) / 6
        right = (hi - mid) * (fmid + 4 * frm + fhi) / 6
        delta = left + right - s
        if depth >= max_depth or abs(delta) <= 15 * eps:
            total += left + right + delta / 15
        else:
            stack.append((lo, mid, flo, flm, fmid, left, eps / 2, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, eps / 2, depth + 1))
    return total


@lru_cache(maxsize=8)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[-1, 1]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panels(breaks, max_width: float) -> tuple[np.ndarray, np.ndarray]:
    """Split each interval between sorted ``breaks`` into equal panels no wider than ``max_width``."""
    breaks = np.asarray(breaks, dtype=float)
    lo, hi = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        n = max(1, math.ceil((b - a) / max_width))
        edges = np.linspace(a, b, n + 1)
        lo.append(edges[:-1])
        hi.append(edges[1:])
    if not lo:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(lo), np.concatenate(hi)

