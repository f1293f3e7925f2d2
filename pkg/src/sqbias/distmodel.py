"""Exact representations of compactly supported laws on the real line.

Three value types are provided: :class:`DiscreteDist` (finitely many atoms),
:class:`PiecewiseDensity` (density that is a polynomial of degree <= 2 on each
interval of a partition) and :class:`MixtureDist` (finite mixtures of the
other two, nested to bounded depth).  Every computation goes through a
flattened form: merged atoms plus one piecewise polynomial density written
in local coordinates ``h = x - left_edge`` on each interval, which keeps
moments, distribution functions and integrals exact up to rounding.

The distribution function follows the left-continuous convention
``F(u) = P(X < u)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, fsum
from typing import Iterable, Sequence, Union

import numpy as np

PROB_TOL = 1e-12
MAX_DEGREE = 2
MAX_DEPTH = 32


class InvalidDistribution(ValueError):
    """Raised when a distribution violates its construction invariants."""


class PreconditionError(ValueError):
    """Raised when an operation is applied outside its domain."""


@dataclass(frozen=True)
class DiscreteDist:
    atoms: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        atoms = tuple(float(a) for a in self.atoms)
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)
        if not atoms or len(atoms) != len(probs):
            raise InvalidDistribution("atoms and probs must be non-empty and of equal length")
        if not all(math.isfinite(a) for a in atoms):
            raise InvalidDistribution("atoms must be finite")
        if any(b <= a for a, b in zip(atoms, atoms[1:])):
            raise InvalidDistribution("atoms must be strictly increasing")
        if any(not (p > 0) or not math.isfinite(p) for p in probs):
            raise InvalidDistribution("probs must be positive")
        if abs(fsum(probs) - 1.0) > PROB_TOL:
            raise InvalidDistribution(f"probs sum to {fsum(probs)!r}, not 1")


@dataclass(frozen=True)
class PiecewiseDensity:
    """Density ``c0 + c1*x + c2*x**2`` on each ``[breakpoints[k], breakpoints[k+1])``.

    Coefficients are in the global variable ``x``.  The density vanishes
    outside ``[breakpoints[0], breakpoints[-1]]``.
    """

    breakpoints: tuple[float, ...]
    coeffs: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        rows = []
        for row in self.coeffs:
            row = tuple(float(c) for c in row)
            if len(row) > MAX_DEGREE + 1:
                if any(c != 0.0 for c in row[MAX_DEGREE + 1:]):
                    raise InvalidDistribution("density pieces must have degree <= 2")
                row = row[:MAX_DEGREE + 1]
            rows.append(row + (0.0,) * (MAX_DEGREE + 1 - len(row)))
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "coeffs", tuple(rows))
        if len(bps) < 2 or len(rows) != len(bps) - 1:
            raise InvalidDistribution("need n+1 breakpoints for n coefficient triples")
        if not all(math.isfinite(b) for b in bps):
            raise InvalidDistribution("breakpoints must be finite (compact support only)")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise InvalidDistribution("breakpoints must be strictly increasing")
        if not all(math.isfinite(c) for row in rows for c in row):
            raise InvalidDistribution("coefficients must be finite")
        edges = np.asarray(bps)
        local = _global_to_local(np.asarray(rows), edges[:-1])
        widths = np.diff(edges)
        if _min_on_pieces(local, widths) < -PROB_TOL:
            raise InvalidDistribution("density is negative somewhere")
        mass = fsum(_piece_masses(local, widths))
        if abs(mass - 1.0) > PROB_TOL:
            raise InvalidDistribution(f"density integrates to {mass!r}, not 1")


@dataclass(frozen=True)
class MixtureDist:
    components: tuple[tuple[float, "Distribution"], ...]

    def __post_init__(self):
        comps = tuple((float(w), d) for w, d in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise InvalidDistribution("mixture needs at least one component")
        for w, d in comps:
            if not (w > 0) or not math.isfinite(w):
                raise InvalidDistribution("mixture weights must be positive")
            if not isinstance(d, (DiscreteDist, PiecewiseDensity, MixtureDist)):
                raise InvalidDistribution(f"not a distribution: {d!r}")
        if abs(fsum(w for w, _ in comps) - 1.0) > PROB_TOL:
            raise InvalidDistribution("mixture weights must sum to 1")
        if _depth(self) > MAX_DEPTH:
            raise InvalidDistribution("mixture nesting too deep")


Distribution = Union[DiscreteDist, PiecewiseDensity, MixtureDist]


@dataclass(frozen=True)
class MomentSet:
    mean: float
    second: float
    third: float
    abs_third: float

    @property
    def variance(self) -> float:
        return self.second - self.mean**2


def _depth(d) -> int:
    if isinstance(d, MixtureDist):
        return 1 + max(_depth(c) for _, c in d.components)
    return 0


# ---------------------------------------------------------------------------
# polynomial helpers (coefficient arrays, lowest degree first)
# ---------------------------------------------------------------------------


def _shift_coeffs(coef: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Rows ``q`` -> rows of ``h -> q(h + d)``; ``d`` has one entry per row."""
    out = np.array(np.atleast_2d(coef), dtype=float)
    d = np.asarray(d, dtype=float).reshape(-1)
    if not d.any():
        return out
    deg = out.shape[1] - 1
    # Taylor shift by repeated synthetic division
    for k in range(deg):
        for j in range(deg - 1, k - 1, -1):
            out[:, j] += d * out[:, j + 1]
    return out


def _global_to_local(coef: np.ndarray, left: np.ndarray) -> np.ndarray:
    return _shift_coeffs(coef, left)


def _local_to_global(coef: np.ndarray, left: np.ndarray) -> np.ndarray:
    return _shift_coeffs(coef, -np.asarray(left, dtype=float)) + 0.0


def _antiderivative(coef: np.ndarray) -> np.ndarray:
    """Rows of the antiderivative vanishing at ``h = 0``."""
    coef = np.atleast_2d(coef)
    k = np.arange(1, coef.shape[1] + 1)
    return np.hstack([np.zeros((coef.shape[0], 1)), coef / k])


def _polyval_rows(coef: np.ndarray, h) -> np.ndarray:
    """Evaluate row ``k`` of ``coef`` at ``h[k]`` (Horner)."""
    coef = np.atleast_2d(coef)
    h = np.asarray(h, dtype=float)
    acc = np.zeros(np.broadcast(coef[:, 0], h).shape)
    for j in range(coef.shape[1] - 1, -1, -1):
        acc = acc * h + coef[:, j]
    return acc


def _piece_masses(local: np.ndarray, widths: np.ndarray) -> np.ndarray:
    if local.shape[0] == 0:
        return np.zeros(0)
    return _polyval_rows(_antiderivative(local), widths)


def _min_on_pieces(local: np.ndarray, widths: np.ndarray) -> float:
    if local.shape[0] == 0:
        return 0.0
    vals = [_polyval_rows(local, 0.0), _polyval_rows(local, widths)]
    if local.shape[1] >= 3:
        c1, c2 = local[:, 1], local[:, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            hs = np.where(c2 != 0, -c1 / (2 * np.where(c2 != 0, c2, 1.0)), -1.0)
        inside = (hs > 0) & (hs < widths)
        if inside.any():
            vals.append(_polyval_rows(local[inside], hs[inside]))
    return float(min(v.min() for v in vals))


def _trim_degree(coef: np.ndarray) -> np.ndarray:
    coef = np.atleast_2d(coef)
    while coef.shape[1] > 1 and not np.any(coef[:, -1]):
        coef = coef[:, :-1]
    return coef


# ---------------------------------------------------------------------------
# flattened form
# ---------------------------------------------------------------------------


class Flat:
    """Merged atoms plus a single piecewise polynomial density.

    ``coef[k]`` holds the local polynomial on ``[edges[k], edges[k+1])`` in
    the variable ``h = x - edges[k]``.  Not part of the public value types;
    every operation builds one on demand.
    """

    __slots__ = ("atoms", "probs", "edges", "coef")

    def __init__(self, atoms, probs, edges, coef):
        self.atoms = np.asarray(atoms, dtype=float)
        self.probs = np.asarray(probs, dtype=float)
        self.edges = np.asarray(edges, dtype=float)
        coef = np.asarray(coef, dtype=float)
        if coef.ndim == 1:
            coef = coef.reshape(0, 1) if coef.size == 0 else coef.reshape(1, -1)
        self.coef = coef

    @property
    def n_pieces(self) -> int:
        return self.coef.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def has_density(self) -> bool:
        return self.n_pieces > 0

    @property
    def degree(self) -> int:
        return _trim_degree(self.coef).shape[1] - 1 if self.has_density else 0

    def piece_masses(self) -> np.ndarray:
        return _piece_masses(self.coef, self.widths)

    def support(self) -> tuple[float, float]:
        lo, hi = [], []
        if self.atoms.size:
            lo.append(self.atoms[0])
            hi.append(self.atoms[-1])
        if self.has_density:
            lo.append(self.edges[0])
            hi.append(self.edges[-1])
        return float(min(lo)), float(max(hi))

    def grid(self) -> np.ndarray:
        return np.unique(np.concatenate([self.atoms, self.edges]))

    def density_on(self, grid: np.ndarray) -> np.ndarray:
        """Local coefficients re-anchored on each interval of a finer ``grid``."""
        out = np.zeros((len(grid) - 1, self.coef.shape[1]))
        if not self.has_density or len(grid) < 2:
            return out
        left = grid[:-1]
        mid = 0.5 * (grid[:-1] + grid[1:])
        k = np.searchsorted(self.edges, mid, side="right") - 1
        ok = (k >= 0) & (k < self.n_pieces)
        if ok.any():
            out[ok] = _shift_coeffs(self.coef[k[ok]], left[ok] - self.edges[k[ok]])
        return out

    def cdf(self, u) -> np.ndarray:
        """Vectorised ``P(X < u)`` (or ``P(X <= u)`` via :meth:`cdf_right`)."""
        return self._cdf(u, "left")

    def cdf_right(self, u) -> np.ndarray:
        return self._cdf(u, "right")

    def _cdf(self, u, side) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        shape = u.shape
        u = u.reshape(-1)
        out = np.zeros(u.shape)
        if self.atoms.size:
            cum = np.concatenate([[0.0], np.cumsum(self.probs)])
            out = out + cum[np.searchsorted(self.atoms, u, side=side)]
        if self.has_density:
            masses = self.piece_masses()
            cum = np.concatenate([[0.0], np.cumsum(masses)])
            k = np.searchsorted(self.edges, u, side="right") - 1
            below = k < 0
            above = k >= self.n_pieces
            kk = np.clip(k, 0, self.n_pieces - 1)
            h = u - self.edges[kk]
            part = cum[kk] + _polyval_rows(_antiderivative(self.coef)[kk], h)
            part = np.where(below, 0.0, np.where(above, cum[-1], part))
            out = out + part
        # cumulative sums can overshoot by an ulp
        return np.clip(out, 0.0, 1.0).reshape(shape)

    def raw_moment(self, n: int) -> float:
        terms = list(self.probs * self.atoms**n) if self.atoms.size else []
        if self.has_density:
            terms.extend(_piece_power_integrals(self.edges[:-1], self.widths, self.coef, n))
        return fsum(terms)

    def abs_moment(self, r: float) -> float:
        terms = list(self.probs * np.abs(self.atoms) ** r) if self.atoms.size else []
        if self.has_density:
            grid = np.unique(np.concatenate([self.edges, [0.0]]))
            grid = grid[(grid >= self.edges[0]) & (grid <= self.edges[-1])]
            local = self.density_on(grid)
            glob = _local_to_global(local, grid[:-1])
            for (a, b), row in zip(zip(grid[:-1], grid[1:]), glob):
                if not np.any(row):
                    continue
                if a >= 0:
                    lo, hi, sgn = a, b, 1.0
                else:
                    lo, hi, sgn = -b, -a, -1.0
                for m, c in enumerate(row):
                    if c:
                        e = r + m + 1
                        terms.append(c * sgn**m * (hi**e - lo**e) / e)
        return fsum(terms)


def _piece_power_integrals(left, widths, coef, n) -> list[float]:
    """``int_0^L (left + h)**n q(h) dh`` for each piece."""
    out = []
    for e, L, q in zip(left, widths, coef):
        xn = np.array([comb(n, j) * e ** (n - j) for j in range(n + 1)])
        prod = np.convolve(xn, q)
        k = np.arange(1, prod.size + 1)
        out.append(fsum(prod * L**k / k))
    return out


def _merge_atoms(atoms: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if atoms.size == 0:
        return atoms, probs
    uniq, inv = np.unique(atoms, return_inverse=True)
    merged = np.zeros(uniq.size)
    np.add.at(merged, inv, probs)
    keep = merged > 0
    return uniq[keep], merged[keep]


def _merge_flats(parts: Sequence[tuple[float, Flat]]) -> Flat:
    atoms = np.concatenate([f.atoms for _, f in parts])
    probs = np.concatenate([w * f.probs for w, f in parts])
    atoms, probs = _merge_atoms(atoms, probs)
    dens = [(w, f) for w, f in parts if f.has_density]
    if not dens:
        return Flat(atoms, probs, [], np.zeros((0, 1)))
    grid = np.unique(np.concatenate([f.edges for _, f in dens]))
    width = max(f.coef.shape[1] for _, f in dens)
    coef = np.zeros((grid.size - 1, width))
    for w, f in dens:
        local = f.density_on(grid)
        coef[:, : local.shape[1]] += w * local
    return Flat(atoms, probs, grid, coef)


def flatten(d: Distribution) -> Flat:
    if isinstance(d, DiscreteDist):
        return Flat(d.atoms, d.probs, [], np.zeros((0, 1)))
    if isinstance(d, PiecewiseDensity):
        edges = np.asarray(d.breakpoints)
        return Flat([], [], edges, _global_to_local(np.asarray(d.coeffs), edges[:-1]))
    if isinstance(d, MixtureDist):
        return _merge_flats([(w, flatten(c)) for w, c in d.components])
    raise TypeError(f"not a distribution: {d!r}")


def unflatten(f: Flat) -> Distribution:
    """Turn a flat form back into a public value (renormalising each part)."""
    atom_mass = fsum(f.probs) if f.atoms.size else 0.0
    dens_mass = fsum(f.piece_masses()) if f.has_density else 0.0
    parts = []
    if f.atoms.size:
        probs = f.probs / atom_mass
        parts.append((atom_mass, DiscreteDist(tuple(f.atoms), tuple(probs))))
    if f.has_density and dens_mass > 0:
        coef = _trim_degree(f.coef)
        if coef.shape[1] - 1 > MAX_DEGREE:
            raise PreconditionError(
                f"result has density pieces of degree {coef.shape[1] - 1}; only degree <= 2 is representable"
            )
        edges, coef = _strip_zero_ends(f.edges, coef)
        glob = _local_to_global(coef / dens_mass, edges[:-1])
        glob = np.hstack([glob, np.zeros((glob.shape[0], MAX_DEGREE + 1 - glob.shape[1]))])
        parts.append(
            (dens_mass, PiecewiseDensity(tuple(edges), tuple(tuple(r) for r in glob)))
        )
    if len(parts) == 1:
        return parts[0][1]
    total = atom_mass + dens_mass
    return MixtureDist(tuple((w / total, d) for w, d in parts))


def _strip_zero_ends(edges, coef):
    nz = np.flatnonzero(np.any(coef != 0, axis=1))
    if nz.size == 0:
        return edges, coef
    lo, hi = nz[0], nz[-1]
    return edges[lo : hi + 2], coef[lo : hi + 1]


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def cdf(d: Distribution, u: float) -> float:
    """``P(X < u)``."""
    return float(flatten(d).cdf(u))


def cdf_right(d: Distribution, u: float) -> float:
    """``P(X <= u)``."""
    return float(flatten(d).cdf_right(u))


def raw_moment(d: Distribution, n: int) -> float:
    return flatten(d).raw_moment(n)


def moments(d: Distribution) -> MomentSet:
    f = flatten(d)
    return MomentSet(
        mean=f.raw_moment(1),
        second=f.raw_moment(2),
        third=f.raw_moment(3),
        abs_third=f.abs_moment(3),
    )


def abs_moment(d: Distribution, r: float) -> float:
    """``E|X|**r``, in closed form for every ``r > 0``."""
    if not r > 0:
        raise PreconditionError("abs_moment needs r > 0")
    return flatten(d).abs_moment(r)


def support(d: Distribution) -> tuple[float, float]:
    return flatten(d).support()


def affine(d: Distribution, scale: float, shift: float = 0.0) -> Distribution:
    """Law of ``scale * X + shift``."""
    if scale == 0:
        return DiscreteDist((shift,), (1.0,))
    if isinstance(d, DiscreteDist):
        atoms = [scale * a + shift for a in d.atoms]
        probs = list(d.probs)
        if scale < 0:
            atoms.reverse()
            probs.reverse()
        return DiscreteDist(tuple(atoms), tuple(probs))
    if isinstance(d, PiecewiseDensity):
        # g(y) = f((y - shift) / scale) / |scale|
        glob = np.asarray(d.coeffs)
        a = 1.0 / scale
        b = -shift / scale
        # substitute x = a*y + b into c0 + c1 x + c2 x^2
        c0, c1, c2 = glob[:, 0], glob[:, 1], glob[:, 2]
        new = np.column_stack(
            [c0 + c1 * b + c2 * b * b, c1 * a + 2 * c2 * a * b, c2 * a * a]
        ) / abs(scale)
        bps = [scale * x + shift for x in d.breakpoints]
        if scale < 0:
            bps.reverse()
            new = new[::-1]
        return PiecewiseDensity(tuple(bps), tuple(tuple(r + 0.0) for r in new))
    return MixtureDist(tuple((w, affine(c, scale, shift)) for w, c in d.components))


def standardize(d: Distribution) -> Distribution:
    """Law of ``(X - EX) / sd(X)``.

    The variance is taken from the centred law (two-pass), since
    ``EX**2 - (EX)**2`` cancels badly when the spread is small next to the mean.
    """
    f = flatten(d)
    mean, second = f.raw_moment(1), f.raw_moment(2)
    if mean == 0.0 and second == 1.0:
        return d
    centred = affine(d, 1.0, -mean) if mean != 0.0 else d
    fc = flatten(centred)
    resid = fc.raw_moment(1)
    var = fc.raw_moment(2) - resid * resid
    if not var > 0:
        raise PreconditionError("degenerate distribution")
    sd = math.sqrt(var)
    return affine(centred, 1.0 / sd, -resid / sd)


def mixture(components: Iterable[tuple[float, Distribution]]) -> MixtureDist:
    return MixtureDist(tuple(components))


def convolve(a: Distribution, b: Distribution) -> Distribution:
    """Law of ``X + Y`` for independent ``X ~ a`` (discrete) and ``Y ~ b``."""
    fa, fb = flatten(a), flatten(b)
    if fa.has_density and fb.has_density:
        raise PreconditionError("convolution of two densities is not supported")
    if fa.has_density:
        fa, fb = fb, fa
    parts = []
    for x, p in zip(fa.atoms, fa.probs):
        shifted = Flat(fb.atoms + x, fb.probs, fb.edges + x if fb.has_density else [], fb.coef)
        parts.append((p, shifted))
    return unflatten(_merge_flats(parts))


def pushforward(d: DiscreteDist, fn) -> DiscreteDist:
    """Law of ``fn(X)`` for discrete ``X``; atoms with equal images are merged."""
    if not isinstance(d, DiscreteDist):
        raise PreconditionError("pushforward is defined for discrete laws only")
    atoms, probs = _merge_atoms(
        np.array([fn(a) for a in d.atoms], dtype=float), np.asarray(d.probs)
    )
    return DiscreteDist(tuple(atoms), tuple(probs))


# convenience constructors


def point_mass(c: float) -> DiscreteDist:
    return DiscreteDist((c,), (1.0,))


def rademacher(sigma: float = 1.0) -> DiscreteDist:
    return DiscreteDist((-abs(sigma), abs(sigma)), (0.5, 0.5))


def uniform(a: float, b: float) -> PiecewiseDensity:
    return PiecewiseDensity((a, b), ((1.0 / (b - a), 0.0, 0.0),))
