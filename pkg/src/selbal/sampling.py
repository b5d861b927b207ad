"""Seeded generators for random exact unit vectors and families.

A dyadic unit vector needs integer numerators whose squares sum to p^2k;
the generator decomposes p^2k into squares by randomized backtracking and
scatters the parts over random coordinates with random signs.  Everything is
driven by a caller-supplied ``random.Random`` so runs are reproducible.
"""
from __future__ import annotations

import math
from random import Random

from .errors import ParameterError
from .vectorspace import ScaledVector, UnitVectorFamily


def _square_decomposition(total: int, max_terms: int, max_val: int,
                          rng: Random) -> list[int] | None:
    """Random nonincreasing positive integers whose squares sum to total."""
    if total == 0:
        return []
    if max_terms == 0:
        return None
    top = min(max_val, math.isqrt(total))
    if max_terms * top * top < total:
        return None
    choices = list(range(1, top + 1))
    rng.shuffle(choices)
    for a in choices:
        rest = _square_decomposition(total - a * a, max_terms - 1, a, rng)
        if rest is not None:
            return [a] + rest
    return None


def random_unit_vector(rng: Random, n: int, p: int, k: int) -> ScaledVector:
    """A random exact unit vector: random support, random signs.

    Always succeeds: the single-term decomposition p^k is available in any
    dimension.
    """
    total = p ** (2 * k)
    parts = _square_decomposition(total, min(n, total), total, rng)
    assert parts is not None
    coords = rng.sample(range(n), len(parts))
    entries = {c: a * rng.choice((-1, 1)) for c, a in zip(coords, parts)}
    return ScaledVector(n, p, k, entries)


def random_family(rng: Random, m: int, n: int, p: int = 2,
                  k: int = 1) -> UnitVectorFamily:
    """m independent random exact unit vectors sharing one (n, p, k)."""
    if m < 1:
        raise ParameterError("family size must be >= 1")
    return UnitVectorFamily(
        tuple(random_unit_vector(rng, n, p, k) for _ in range(m)))
