"""Size-, square-, zero- and double-size-bias transformations.

All transforms act on the flattened form and return public distribution
values.  Atoms at zero carry no weight after size or square biasing and
are dropped.  Density pieces are multiplied by ``x`` or ``x**2`` (size and
square bias) or replaced by a tail integral (zero bias); results of degree
above 2 are rejected rather than approximated.
"""

from __future__ import annotations

import logging
from math import fsum
from typing import Sequence

import numpy as np

from .distmodel import (
    DiscreteDist,
    Distribution,
    Flat,
    PiecewiseDensity,
    PreconditionError,
    _antiderivative,
    _polyval_rows,
    _trim_degree,
    convolve,
    flatten,
    mixture,
    point_mass,
    unflatten,
)

log = logging.getLogger(__name__)

MEAN_TOL = 1e-10


def _reweight(f: Flat, power: int) -> Flat:
    """Multiply the law by ``x**power`` (unnormalised)."""
    w = f.probs * f.atoms**power
    keep = w != 0
    atoms, probs = f.atoms[keep], w[keep]
    coef = f.coef
    if f.has_density:
        # (left + h)**power * q(h)
        left = f.edges[:-1]
        out = np.zeros((f.n_pieces, coef.shape[1] + power))
        for k in range(f.n_pieces):
            factor = np.array([1.0])
            for _ in range(power):
                factor = np.convolve(factor, [left[k], 1.0])
            out[k] = np.convolve(factor, coef[k])
        coef = _trim_degree(out)
    return Flat(atoms, probs, f.edges, coef)


def _normalise(f: Flat) -> Flat:
    total = fsum(list(f.probs) + list(f.piece_masses()))
    return Flat(f.atoms, f.probs / total, f.edges, f.coef / total)


def _check_nonnegative(f: Flat):
    lo, _ = f.support()
    if lo < 0:
        raise PreconditionError("size bias requires nonnegative nondegenerate input")


def size_bias(d: Distribution) -> Distribution:
    """Reweight a nonnegative law by ``x / EX``."""
    f = flatten(d)
    _check_nonnegative(f)
    if not f.raw_moment(1) > 0:
        raise PreconditionError("size bias requires nonnegative nondegenerate input")
    return unflatten(_normalise(_reweight(f, 1)))


def square_bias(d: Distribution) -> Distribution:
    """Reweight by ``x**2 / EX**2``.

    For a discrete input the new probabilities are ``p_k a_k**2 / EX**2``
    computed atom by atom, so symmetric two-point laws come back bit for bit.
    """
    f = flatten(d)
    if isinstance(d, DiscreteDist):
        w = [p * a * a for a, p in zip(d.atoms, d.probs)]
        s2 = fsum(w)
        if not s2 > 0:
            raise PreconditionError("square bias requires EX^2 > 0")
        pairs = [(a, x / s2) for a, x in zip(d.atoms, w) if x != 0]
        return DiscreteDist(tuple(a for a, _ in pairs), tuple(p for _, p in pairs))
    if not f.raw_moment(2) > 0:
        raise PreconditionError("square bias requires EX^2 > 0")
    return unflatten(_normalise(_reweight(f, 2)))


def double_size_bias(d: Distribution) -> Distribution:
    return size_bias(size_bias(d))


def zero_bias(d: Distribution) -> PiecewiseDensity:
    """Density ``x -> E[X 1(X > x)] / EX**2`` of the zero-biased law.

    Intervals lying left of zero use the equivalent lower-tail form
    ``-E[X 1(X <= x)]`` so that both sides are sums of same-signed terms.
    Any residual mean (at most ``MEAN_TOL``) is absorbed by renormalising.
    """
    f = flatten(d)
    mean = f.raw_moment(1)
    if abs(mean) > MEAN_TOL:
        raise PreconditionError(f"zero bias requires mean zero (got {mean!r})")
    s2 = f.raw_moment(2)
    if not s2 > 0:
        raise PreconditionError("zero bias requires EX^2 > 0")

    grid = f.grid()
    n = grid.size - 1
    if n < 1:
        raise PreconditionError("zero bias requires EX^2 > 0")
    widths = np.diff(grid)
    left = grid[:-1]
    dens = f.density_on(grid)
    # y*f(y) in local coords: (left + h) q(h)
    yf = np.zeros((n, dens.shape[1] + 1))
    yf[:, :-1] += left[:, None] * dens
    yf[:, 1:] += dens
    W = _antiderivative(yf)  # W(h) = int_0^h y f
    piece_first = _polyval_rows(W, widths)

    # first-moment mass of atoms at each grid point
    atom_first = np.zeros(grid.size)
    if f.atoms.size:
        idx = np.searchsorted(grid, f.atoms)
        np.add.at(atom_first, idx, f.probs * f.atoms)

    # upper[i]: E[X 1(X >= grid[i+1])] (atoms at grid[i+1] and everything after)
    upper = np.zeros(n)
    acc = []
    for i in range(n - 1, -1, -1):
        acc.append(atom_first[i + 1])
        if i + 1 < n:
            acc.append(piece_first[i + 1])
        upper[i] = fsum(acc)
    # lower[i]: E[X 1(X <= grid[i])]
    lower = np.zeros(n)
    acc = []
    for i in range(n):
        acc.append(atom_first[i])
        if i > 0:
            acc.append(piece_first[i - 1])
        lower[i] = fsum(acc)

    out = np.zeros((n, W.shape[1]))
    for i in range(n):
        if grid[i + 1] <= 0:
            # -(lower + W(h))
            out[i] = -W[i]
            out[i, 0] -= lower[i]
        else:
            # upper + W(L) - W(h)
            out[i] = -W[i]
            out[i, 0] += upper[i] + piece_first[i]
    out = _trim_degree(out / s2)
    if out.shape[1] - 1 > 2:
        raise PreconditionError("zero bias of this law has density pieces of degree > 2")
    z = Flat([], [], grid, out)
    mass = fsum(z.piece_masses())
    if abs(mass - 1.0) > 1e-12:
        log.warning("zero bias renormalised by factor %.3e", mass)
    res = unflatten(Flat([], [], grid, out / mass))
    assert isinstance(res, PiecewiseDensity)
    return res


def uniform_product_square_bias(d: Distribution) -> PiecewiseDensity:
    """Law of ``U * X_sq`` with ``U ~ Uniform[-1, 1]`` independent of the square-biased ``X_sq``."""
    f = flatten(d)
    if f.has_density:
        raise PreconditionError("uniform_product_square_bias is defined for discrete laws only")
    if abs(f.raw_moment(1)) > MEAN_TOL:
        raise PreconditionError("uniform_product_square_bias requires mean zero")
    sq = square_bias(DiscreteDist(tuple(f.atoms), tuple(f.probs)))
    assert isinstance(sq, DiscreteDist)
    radii = np.abs(np.asarray(sq.atoms))
    half = np.unique(radii)
    edges = np.concatenate([-half[::-1], half])
    mids = 0.5 * (edges[:-1] + edges[1:])
    heights = np.array(
        [fsum(q / (2 * a) for a, q in zip(radii, sq.probs) if a > abs(m)) for m in mids]
    )
    coef = np.column_stack([heights, np.zeros_like(heights), np.zeros_like(heights)])
    mass = fsum(heights * np.diff(edges))
    res = unflatten(Flat([], [], edges, coef / mass))
    assert isinstance(res, PiecewiseDensity)
    return res


def zero_bias_decomposition(summands: Sequence[Distribution]) -> Distribution:
    """Zero-biased law of an independent sum as a variance-weighted mixture.

    Component ``i`` is the law of ``sum_{j != i} Y_j + Y_i^(z)`` and carries
    weight ``Var Y_i / Var(sum)``.
    """
    if not summands:
        raise PreconditionError("need at least one summand")
    for y in summands:
        if not isinstance(y, DiscreteDist):
            raise PreconditionError("decomposition requires discrete summands")
    variances = [flatten(y).raw_moment(2) for y in summands]
    total = fsum(variances)
    comps = []
    for i, y in enumerate(summands):
        rest: Distribution = point_mass(0.0)
        for j, other in enumerate(summands):
            if j != i:
                rest = convolve(rest, other)
        comps.append((variances[i] / total, convolve(rest, zero_bias(y))))
    return mixture(comps)


def sum_law(summands: Sequence[DiscreteDist]) -> Distribution:
    """Law of an independent sum of discrete summands."""
    out: Distribution = point_mass(0.0)
    for y in summands:
        out = convolve(out, y)
    return out
