"""Seeded generation of random laws.

SplitMix64 is used (rather than numpy's generators) because its output is
fixed by three published constants, so suites are reproducible bit for bit
by any implementation.
"""

from __future__ import annotations

import math

from .distmodel import DiscreteDist, standardize

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform on ``[0, 1)`` with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Integer in ``[lo, hi]`` (modulo bias is negligible for small ranges)."""
        return lo + self.next_u64() % (hi - lo + 1)

    def simplex(self, n: int) -> list[float]:
        """Flat Dirichlet sample via normalised exponentials."""
        e = [-math.log(1.0 - self.random()) for _ in range(n)]
        s = math.fsum(e)
        return [v / s for v in e]


def _discrete(atoms, probs) -> DiscreteDist:
    pairs = sorted(zip(atoms, probs))
    total = math.fsum(p for _, p in pairs)
    return DiscreteDist(tuple(a for a, _ in pairs), tuple(p / total for _, p in pairs))


def random_discrete(rng: SplitMix64, lo: float = -5.0, hi: float = 5.0, min_atoms: int = 2, max_atoms: int = 6) -> DiscreteDist:
    while True:
        n = rng.randint(min_atoms, max_atoms)
        atoms = [rng.uniform(lo, hi) for _ in range(n)]
        probs = rng.simplex(n)
        if len(set(atoms)) == n and min(probs) > 0:
            return _discrete(atoms, probs)


def random_standardized(rng: SplitMix64, **kw) -> DiscreteDist:
    """2-6 atoms uniform on ``[-5, 5]``, flat simplex weights, then standardized."""
    d = standardize(random_discrete(rng, **kw))
    assert isinstance(d, DiscreteDist)
    return d


def random_nonnegative(rng: SplitMix64) -> DiscreteDist:
    return random_discrete(rng, 0.0, 5.0)


def random_mean_zero(rng: SplitMix64) -> DiscreteDist:
    """Centred (not rescaled) random law."""
    d = random_discrete(rng)
    m = math.fsum(a * p for a, p in zip(d.atoms, d.probs))
    return DiscreteDist(tuple(a - m for a in d.atoms), d.probs)


def random_symmetric_standardized(rng: SplitMix64) -> DiscreteDist:
    """Symmetric law on 1-3 mirrored pairs (plus an optional atom at 0), variance 1."""
    k = rng.randint(1, 3)
    radii = sorted({rng.uniform(0.05, 5.0) for _ in range(k)})
    with_zero = rng.randint(0, 1) == 1
    w = rng.simplex(len(radii) + (1 if with_zero else 0))
    atoms, probs = [], []
    for r, p in zip(radii, w):
        atoms += [-r, r]
        probs += [p / 2, p / 2]
    if with_zero:
        atoms.append(0.0)
        probs.append(w[-1])
    d = _discrete(atoms, probs)
    sd = math.sqrt(math.fsum(p * a * a for a, p in zip(d.atoms, d.probs)))
    return DiscreteDist(tuple(a / sd for a in d.atoms), d.probs)
