"""Characteristic functions and their first two derivatives, in closed form.

For atoms the values are finite sums.  On a density piece ``[e, e + L)`` with
local polynomial ``q`` the integrals reduce to

    J_j(t) = int_0^L h**j exp(i t h) dh,

evaluated by a power series when ``|t| L`` is small and by integration by
parts otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .distmodel import Distribution, Flat, PreconditionError, flatten
from .transforms import MEAN_TOL

STD_TOL = 1e-10
_SERIES_CUTOFF = 1.0
_SERIES_TERMS = 40


@dataclass(frozen=True)
class CharFnTriple:
    f: complex
    fprime: complex
    fsecond: complex


def _j_integrals(t: np.ndarray, L: float, jmax: int) -> np.ndarray:
    """``J_j(t)`` for ``j = 0..jmax``; shape ``(jmax + 1, len(t))``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros((jmax + 1, t.size), dtype=complex)
    small = np.abs(t) * L < _SERIES_CUTOFF
    if small.any():
        ts = t[small]
        # sum_k (i t)^k / k! * L^(j+k+1) / (j+k+1)
        for j in range(jmax + 1):
            acc = np.zeros(ts.size, dtype=complex)
            term = np.ones(ts.size, dtype=complex)
            for k in range(_SERIES_TERMS):
                if k:
                    term = term * (1j * ts * L) / k
                acc += term / (j + k + 1)
            out[j, small] = acc * L ** (j + 1)
    big = ~small
    if big.any():
        tb = t[big]
        it = 1j * tb
        e = np.exp(it * L)
        prev = (e - 1.0) / it
        out[0, big] = prev
        for j in range(1, jmax + 1):
            prev = (L**j * e - j * prev) / it
            out[j, big] = prev
    return out


def _piece_terms(f: Flat, t: np.ndarray, m: int) -> np.ndarray:
    """``int x**m exp(itx) f(x) dx`` over the density part."""
    total = np.zeros(t.size, dtype=complex)
    for e, L, q in zip(f.edges[:-1], f.widths, f.coef):
        if not np.any(q):
            continue
        xm = np.array([comb(m, j) * e ** (m - j) for j in range(m + 1)])
        poly = np.convolve(xm, q)
        J = _j_integrals(t, L, poly.size - 1)
        total += np.exp(1j * t * e) * (poly @ J)
    return total


def cf_arrays(d: Distribution | Flat, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised ``(f, f', f'')`` on an array of arguments."""
    f = d if isinstance(d, Flat) else flatten(d)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = []
    for m in range(3):
        acc = np.zeros(t.size, dtype=complex)
        if f.atoms.size:
            phase = np.exp(1j * np.outer(t, f.atoms))
            acc += phase @ (f.probs * (1j * f.atoms) ** m)
        if f.has_density:
            acc += (1j) ** m * _piece_terms(f, t, m)
        out.append(acc)
    return out[0], out[1], out[2]


def cf_eval(d: Distribution, t: float) -> CharFnTriple:
    f0, f1, f2 = cf_arrays(d, [t])
    return CharFnTriple(complex(f0[0]), complex(f1[0]), complex(f2[0]))


def cf_size_bias_arrays(d: Distribution | Flat, t) -> np.ndarray:
    """``f'(t) / f'(0)`` for a nonnegative law with positive mean."""
    f = d if isinstance(d, Flat) else flatten(d)
    lo, _ = f.support()
    mean = f.raw_moment(1)
    if lo < 0 or not mean > 0:
        raise PreconditionError("size bias requires nonnegative nondegenerate input")
    _, f1, _ = cf_arrays(f, t)
    return f1 / (1j * mean)


def cf_size_bias(d: Distribution, t: float) -> complex:
    return complex(cf_size_bias_arrays(d, [t])[0])


def cf_square_bias_arrays(d: Distribution | Flat, t) -> np.ndarray:
    """``-f''(t) / EX**2``."""
    f = d if isinstance(d, Flat) else flatten(d)
    s2 = f.raw_moment(2)
    if not s2 > 0:
        raise PreconditionError("square bias requires EX^2 > 0")
    _, _, f2 = cf_arrays(f, t)
    return -f2 / s2


def cf_square_bias(d: Distribution, t: float) -> complex:
    return complex(cf_square_bias_arrays(d, [t])[0])


def cf_zero_bias_arrays(d: Distribution | Flat, t) -> np.ndarray:
    """``-f'(t) / (EX**2 t)`` on an array, removable singularity at 0 handled.

    For ``|t| R < 1`` (``R`` the support radius) the moment series
    ``sum_k (it)**(k-1) EX**(k+1) / (k! EX**2)`` is used instead, which
    avoids the cancellation in ``f'(t) / t``.
    """
    f = d if isinstance(d, Flat) else flatten(d)
    mean = f.raw_moment(1)
    if abs(mean) > MEAN_TOL:
        raise PreconditionError(f"zero bias requires mean zero (got {mean!r})")
    s2 = f.raw_moment(2)
    if not s2 > 0:
        raise PreconditionError("zero bias requires EX^2 > 0")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lo, hi = f.support()
    radius = max(abs(lo), abs(hi))
    out = np.zeros(t.size, dtype=complex)
    small = np.abs(t) * radius < 1.0
    if small.any():
        ts = t[small]
        mom = [f.raw_moment(k + 1) for k in range(1, _SERIES_TERMS + 1)]
        acc = np.zeros(ts.size, dtype=complex)
        term = np.ones(ts.size, dtype=complex)
        for k in range(1, _SERIES_TERMS + 1):
            if k > 1:
                term = term * (1j * ts)
            acc += term * mom[k - 1] / math.factorial(k)
        out[small] = acc / s2
    big = ~small
    if big.any():
        _, f1, _ = cf_arrays(f, t[big])
        out[big] = -f1 / (s2 * t[big])
    return out


def cf_zero_bias(d: Distribution, t: float) -> complex:
    return complex(cf_zero_bias_arrays(d, [t])[0])


def check_standardized(f: Flat, tol: float = STD_TOL) -> None:
    mean = f.raw_moment(1)
    second = f.raw_moment(2)
    if abs(mean) > tol or abs(second - 1.0) > tol:
        raise PreconditionError(
            f"law is not standardized (mean {mean!r}, second moment {second!r})"
        )


def normal_discrepancy_arrays(d: Distribution | Flat, t) -> np.ndarray:
    f = d if isinstance(d, Flat) else flatten(d)
    check_standardized(f)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    f0, _, _ = cf_arrays(f, t)
    return np.abs(f0 - np.exp(-0.5 * t * t))


def normal_discrepancy(d: Distribution, t: float) -> float:
    """``|f(t) - exp(-t**2 / 2)|`` for a standardized law."""
    return float(normal_discrepancy_arrays(d, [t])[0])
