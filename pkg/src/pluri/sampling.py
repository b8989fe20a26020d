"""Deterministic seeding and random nonsingular configurations."""

from __future__ import annotations

from itertools import combinations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15

FIELD_RANGE = (-1.0, 1.0)
FIELD_SEPARATION = 0.05
ALPHA_RANGE = (0.5, 2.0)
ALPHA_SEPARATION = 0.05


def splitmix64(x: int) -> int:
    x = (x + GOLDEN64) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Per-trial seed: ``splitmix64(seed XOR index * golden)``."""
    return splitmix64((seed & MASK64) ^ ((index * GOLDEN64) & MASK64))


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, index))


def hash_unit(seed: int, coords) -> float:
    """Uniform number in [0, 1) determined by ``seed`` and an integer tuple."""
    h = splitmix64(seed & MASK64)
    for c in coords:
        h = splitmix64(h ^ (int(c) & MASK64))
    return (h >> 11) / float(1 << 53)


def sample_alpha(rng: np.random.Generator, directions, existing=None, *, max_tries=10_000) -> dict:
    """Direction parameters from ALPHA_RANGE, pairwise ALPHA_SEPARATION apart.

    ``existing`` values are kept and new ones are also kept away from them.
    """
    lo, hi = ALPHA_RANGE
    out = dict(existing or {})
    for d in directions:
        if d in out:
            continue
        for _ in range(max_tries):
            a = float(rng.uniform(lo, hi))
            if all(abs(a - b) >= ALPHA_SEPARATION for b in out.values()):
                out[d] = a
                break
        else:
            raise RuntimeError("could not place a separated alpha value")
    return out


def sample_field_values(rng: np.random.Generator, points, pairs, *, separation=FIELD_SEPARATION,
                        value_range=FIELD_RANGE, max_tries=10_000) -> dict:
    """Uniform values on ``points``, rejecting until every pair is separated."""
    points = list(points)
    lo, hi = value_range
    for _ in range(max_tries):
        vals = dict(zip(points, (float(v) for v in rng.uniform(lo, hi, size=len(points)))))
        if all(abs(vals[p] - vals[q]) >= separation for p, q in pairs):
            return vals
    raise RuntimeError("could not sample a separated field")


def all_pairs(points):
    return list(combinations(list(points), 2))
