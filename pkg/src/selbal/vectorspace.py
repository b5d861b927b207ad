"""Exact arithmetic for unit-vector families with base-p rational components.

Every vector component is an integer numerator over a shared denominator
``p**k``.  Squared norms are therefore integers at scale ``p**(2k)``, and the
balancing predicate ``norm < 1`` is decided by comparing integers against
``p**(2k)`` -- never by floating point.  Python integers are
arbitrary-precision, so intermediate products cannot wrap around.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ContractViolation

INSTANCE_FORMAT = "selbal-instance-v1"


@dataclass(frozen=True)
class ScaledVector:
    """Sparse vector in R^n whose entries are ``numerator / p**k``.

    Only nonzero numerators are stored (canonical sparse form).
    """

    n: int
    p: int
    k: int
    entries: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ContractViolation("dimension must be a positive integer")
        if self.p < 2:
            raise ContractViolation("scale base must be an integer >= 2")
        if self.k < 0:
            raise ContractViolation("scale exponent must be >= 0")
        canon = {}
        for idx, num in self.entries.items():
            idx = int(idx)
            num = int(num)
            if not 0 <= idx < self.n:
                raise ContractViolation(
                    f"coordinate index {idx} outside [0, {self.n})")
            if num == 0:
                continue
            canon[idx] = num
        object.__setattr__(self, "entries", canon)

    @classmethod
    def zero(cls, n: int, p: int, k: int) -> "ScaledVector":
        return cls(n, p, k, {})

    @classmethod
    def from_pairs(cls, n: int, p: int, k: int,
                   pairs: Iterable[tuple[int, int]]) -> "ScaledVector":
        ent: dict[int, int] = {}
        for idx, num in pairs:
            if idx in ent:
                raise ContractViolation(f"duplicate coordinate index {idx}")
            ent[idx] = num
        return cls(n, p, k, ent)

    @property
    def scale(self) -> int:
        return self.p ** self.k

    @property
    def scale_sq(self) -> int:
        return self.p ** (2 * self.k)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Entries as (index, numerator) pairs sorted by index."""
        return tuple(sorted(self.entries.items()))

    def value(self, idx: int) -> Fraction:
        """Exact rational value of one component."""
        return Fraction(self.entries.get(idx, 0), self.scale)

    def rescaled(self, k_new: int) -> "ScaledVector":
        """Same vector expressed over denominator p**k_new (k_new >= k)."""
        if k_new < self.k:
            raise ContractViolation("rescaling must not lose precision")
        if k_new == self.k:
            return self
        factor = self.p ** (k_new - self.k)
        return ScaledVector(
            self.n, self.p, k_new,
            {i: a * factor for i, a in self.entries.items()})

    def _aligned(self, other: "ScaledVector") -> tuple["ScaledVector", "ScaledVector"]:
        if self.n != other.n or self.p != other.p:
            raise ContractViolation("vectors live in different spaces")
        k = max(self.k, other.k)
        return self.rescaled(k), other.rescaled(k)

    def __add__(self, other: "ScaledVector") -> "ScaledVector":
        a, b = self._aligned(other)
        ent = dict(a.entries)
        for i, num in b.entries.items():
            ent[i] = ent.get(i, 0) + num
        return ScaledVector(a.n, a.p, a.k, ent)

    def __neg__(self) -> "ScaledVector":
        return ScaledVector(self.n, self.p, self.k,
                            {i: -a for i, a in self.entries.items()})

    def __sub__(self, other: "ScaledVector") -> "ScaledVector":
        return self + (-other)


def norm_sq_scaled(v: ScaledVector) -> int:
    """Squared Euclidean norm times p**(2k), as an exact integer."""
    return sum(a * a for a in v.entries.values())


def is_unit(v: ScaledVector) -> bool:
    return norm_sq_scaled(v) == v.scale_sq


def coordinate_index(x: Sequence[int], L: int, d: int | None = None) -> int:
    """Index of the lattice point ``x`` in [1, L]^d under the fixed bijection.

    Little-endian mixed radix: the first listed component is the least
    significant digit.  Bit-exact so instance files are portable.
    """
    if d is None:
        d = len(x)
    if len(x) != d:
        raise ContractViolation(f"point has {len(x)} components, expected {d}")
    idx = 0
    weight = 1
    for comp in x:
        if not 1 <= comp <= L:
            raise ContractViolation(f"component {comp} outside [1, {L}]")
        idx += (comp - 1) * weight
        weight *= L
    return idx


def coordinate_point(idx: int, L: int, d: int) -> tuple[int, ...]:
    """Inverse of :func:`coordinate_index`."""
    if not 0 <= idx < L ** d:
        raise ContractViolation(f"index {idx} outside [0, {L ** d})")
    comps = []
    for _ in range(d):
        comps.append(idx % L + 1)
        idx //= L
    return tuple(comps)


@dataclass(frozen=True)
class SignVector:
    """Coefficient tuple in {-1, 0, +1}^m."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        for c in coeffs:
            if c not in (-1, 0, 1):
                raise ContractViolation(f"coefficient {c} not in {{-1, 0, 1}}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, m: int) -> "SignVector":
        return cls((0,) * m)

    @property
    def is_trivial(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[int]:
        return iter(self.coeffs)

    def __neg__(self) -> "SignVector":
        return SignVector(tuple(-c for c in self.coeffs))

    def canonical(self) -> "SignVector":
        """Representative with the first nonzero coefficient equal to +1."""
        for c in self.coeffs:
            if c:
                return self if c > 0 else -self
        return self


def _coeff_tuple(eps) -> tuple[int, ...]:
    if isinstance(eps, SignVector):
        return eps.coeffs
    return SignVector(tuple(eps)).coeffs


@dataclass(frozen=True)
class UnitVectorFamily:
    """Ordered family of exactly unit-norm ScaledVectors over one (n, p, k).

    Vectors are rescaled to a common denominator on construction.
    ``provenance`` optionally records how the family was generated, as a
    JSON-ready mapping (see :mod:`selbal.construction`).
    """

    vectors: tuple[ScaledVector, ...]
    provenance: dict | None = None

    def __post_init__(self):
        vectors = tuple(self.vectors)
        if not vectors:
            raise ContractViolation("a family must contain at least one vector")
        n, p = vectors[0].n, vectors[0].p
        for v in vectors:
            if v.n != n or v.p != p:
                raise ContractViolation("all vectors must share one (n, p)")
        k = max(v.k for v in vectors)
        vectors = tuple(v.rescaled(k) for v in vectors)
        for pos, v in enumerate(vectors):
            if not is_unit(v):
                raise ContractViolation(
                    f"vector {pos} has squared scaled norm {norm_sq_scaled(v)}"
                    f" != p^2k = {v.scale_sq}")
        object.__setattr__(self, "vectors", vectors)

    @property
    def n(self) -> int:
        return self.vectors[0].n

    @property
    def m(self) -> int:
        return len(self.vectors)

    @property
    def p(self) -> int:
        return self.vectors[0].p

    @property
    def k(self) -> int:
        return self.vectors[0].k

    @property
    def scale_sq(self) -> int:
        return self.p ** (2 * self.k)

    def with_vectors(self, vectors: Iterable[ScaledVector]) -> "UnitVectorFamily":
        return UnitVectorFamily(tuple(vectors), self.provenance)


def combine(family: UnitVectorFamily, eps) -> ScaledVector:
    """The exact linear combination sum(eps_i * u_i) at the family's scale."""
    coeffs = _coeff_tuple(eps)
    if len(coeffs) != family.m:
        raise ContractViolation(
            f"sign vector has length {len(coeffs)}, family has m={family.m}")
    acc: dict[int, int] = {}
    for c, vec in zip(coeffs, family.vectors):
        if c == 0:
            continue
        for i, a in vec.entries.items():
            acc[i] = acc.get(i, 0) + c * a
    return ScaledVector(family.n, family.p, family.k, acc)


def is_balancing_witness(family: UnitVectorFamily, eps) -> bool:
    """True iff eps is non-trivial and ||sum(eps_i u_i)|| < 1, decided exactly."""
    coeffs = _coeff_tuple(eps)
    if all(c == 0 for c in coeffs):
        return False
    return norm_sq_scaled(combine(family, coeffs)) < family.scale_sq


# ---------------------------------------------------------------------------
# Instance serialization (selbal-instance-v1)
# ---------------------------------------------------------------------------

def family_to_dict(family: UnitVectorFamily) -> dict:
    doc = {
        "format": INSTANCE_FORMAT,
        "n": family.n,
        "m": family.m,
        "p": family.p,
        "k": family.k,
        "vectors": [[[i, a] for i, a in v.pairs()] for v in family.vectors],
    }
    if family.provenance is not None:
        doc["provenance"] = family.provenance
    return doc


def family_from_dict(doc: dict) -> UnitVectorFamily:
    for key in ("format", "n", "m", "p", "k", "vectors"):
        if key not in doc:
            raise ContractViolation(f"instance file missing field '{key}'")
    if doc["format"] != INSTANCE_FORMAT:
        raise ContractViolation(
            f"unsupported instance format '{doc['format']}'")
    n, m, p, k = doc["n"], doc["m"], doc["p"], doc["k"]
    rows = doc["vectors"]
    if len(rows) != m:
        raise ContractViolation(
            f"field 'vectors' has {len(rows)} rows, field 'm' says {m}")
    vectors = []
    for row in rows:
        vectors.append(ScaledVector.from_pairs(
            n, p, k, [(int(i), int(a)) for i, a in row]))
    return UnitVectorFamily(tuple(vectors), doc.get("provenance"))


def dumps_canonical(doc: dict) -> str:
    """Deterministic JSON rendering used for files and reports."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def save_instance(family: UnitVectorFamily, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(family_to_dict(family)))


def load_instance(path) -> UnitVectorFamily:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ContractViolation(f"instance file is not valid JSON: {exc}")
    return family_from_dict(doc)
