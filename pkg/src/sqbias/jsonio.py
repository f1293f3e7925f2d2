"""JSON wire format for distributions.

::

    {"type": "discrete", "atoms": [...], "probs": [...]}
    {"type": "density", "breakpoints": [...], "coeffs": [[c0, c1, c2], ...]}
    {"type": "mixture", "components": [{"weight": w, "dist": {...}}, ...]}

Unknown fields are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .distmodel import (
    DiscreteDist,
    Distribution,
    InvalidDistribution,
    MixtureDist,
    PiecewiseDensity,
)

_FIELDS = {
    "discrete": {"type", "atoms", "probs"},
    "density": {"type", "breakpoints", "coeffs"},
    "mixture": {"type", "components"},
}


def _numbers(seq, what):
    if not isinstance(seq, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in seq
    ):
        raise InvalidDistribution(f"{what} must be a list of numbers")
    return tuple(float(x) for x in seq)


def from_dict(obj: Any) -> Distribution:
    if not isinstance(obj, dict):
        raise InvalidDistribution("distribution must be a JSON object")
    kind = obj.get("type")
    if kind not in _FIELDS:
        raise InvalidDistribution(f"unknown distribution type {kind!r}")
    extra = set(obj) - _FIELDS[kind]
    missing = _FIELDS[kind] - set(obj)
    if extra:
        raise InvalidDistribution(f"unknown fields: {sorted(extra)}")
    if missing:
        raise InvalidDistribution(f"missing fields: {sorted(missing)}")
    if kind == "discrete":
        return DiscreteDist(_numbers(obj["atoms"], "atoms"), _numbers(obj["probs"], "probs"))
    if kind == "density":
        coeffs = obj["coeffs"]
        if not isinstance(coeffs, list):
            raise InvalidDistribution("coeffs must be a list")
        rows = tuple(_numbers(r, "coefficient row") for r in coeffs)
        return PiecewiseDensity(_numbers(obj["breakpoints"], "breakpoints"), rows)
    comps = obj["components"]
    if not isinstance(comps, list):
        raise InvalidDistribution("components must be a list")
    out = []
    for c in comps:
        if not isinstance(c, dict) or set(c) != {"weight", "dist"}:
            raise InvalidDistribution("mixture component must have exactly 'weight' and 'dist'")
        (w,) = _numbers([c["weight"]], "weight")
        out.append((w, from_dict(c["dist"])))
    return MixtureDist(tuple(out))


def _clean(x: float) -> float:
    return x + 0.0


def to_dict(d: Distribution) -> dict:
    if isinstance(d, DiscreteDist):
        return {
            "type": "discrete",
            "atoms": [_clean(a) for a in d.atoms],
            "probs": [_clean(p) for p in d.probs],
        }
    if isinstance(d, PiecewiseDensity):
        return {
            "type": "density",
            "breakpoints": [_clean(b) for b in d.breakpoints],
            "coeffs": [[_clean(c) for c in row] for row in d.coeffs],
        }
    if isinstance(d, MixtureDist):
        return {
            "type": "mixture",
            "components": [{"weight": w, "dist": to_dict(c)} for w, c in d.components],
        }
    raise TypeError(f"not a distribution: {d!r}")


def loads(text: str) -> Distribution:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidDistribution(f"malformed JSON: {exc}") from exc
    return from_dict(obj)


def dumps(d: Distribution) -> str:
    return json.dumps(to_dict(d))


def load(path) -> Distribution:
    return loads(Path(path).read_text(encoding="utf-8"))


def dump(d: Distribution, path) -> None:
    Path(path).write_text(dumps(d) + "\n", encoding="utf-8")
