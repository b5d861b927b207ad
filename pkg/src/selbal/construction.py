"""Generators for non-balancing unit-vector families.

The general builder places, for every translate t of a box and every level
i <= k, the vector p^(-i) * sum of basis vectors indexed by t + S_i, where
the S_i are nested equal-norm lattice subsets.  A 34-vector instance in R^25
(25 basis vectors plus 9 half-neighbor-sum vectors) is provided as a named
instance, and a parameter planner derives (D, L, k) from a growth exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .errors import BudgetExceeded, ContractViolation, ParameterError
from .geometry import DEFAULT_POINT_BUDGET, LatticeShell, Point, find_shell, shell_profile
from .vectorspace import (ScaledVector, UnitVectorFamily, coordinate_index)

PROVENANCE_CONSTRUCTION = "construction"
PROVENANCE_FIGURE = "figure-34"

NEIGHBOR_SHELL_2D = ((-1, 0), (0, -1), (0, 1), (1, 0))


def box_points(lo: int, hi: int, d: int) -> list[Point]:
    """Integer points of [lo, hi]^d in lexicographic order."""
    if hi < lo:
        return []
    return [tuple(q) for q in product(range(lo, hi + 1), repeat=d)]


def nested_subsets(shell: LatticeShell, k: int, p: int) -> tuple[tuple[Point, ...], ...]:
    """Deterministic chain S_0 c S_1 c ... c S_k with |S_i| = p^(2i).

    Points are sorted lexicographically and S_i takes the first p^(2i); the
    chain is nested by construction and contained in the shell.
    """
    if p < 2:
        raise ParameterError("base p must be an integer >= 2")
    if k < 0:
        raise ParameterError("chain depth k must be >= 0")
    need = p ** (2 * k)
    if len(shell) < need:
        raise ParameterError(
            f"shell has {len(shell)} points but the chain needs p^2k = {need}")
    ordered = sorted(shell.points)
    return tuple(tuple(ordered[:p ** (2 * i)]) for i in range(k + 1))


@dataclass(frozen=True)
class ConstructionParams:
    """Everything the general builder needs: (d, p, k, L, shell, chain)."""

    d: int
    p: int
    k: int
    L: int
    shell: LatticeShell
    chain: tuple[tuple[Point, ...], ...]

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError("lattice dimension d must be >= 1")
        if self.p < 2:
            raise ParameterError("base p must be an integer >= 2")
        if self.k < 0:
            raise ParameterError("chain depth k must be >= 0")
        if self.shell.d != self.d:
            raise ParameterError("shell dimension differs from d")
        if len(self.shell) < self.p ** (2 * self.k):
            raise ParameterError(
                f"shell has {len(self.shell)} points, needs p^2k ="
                f" {self.p ** (2 * self.k)}")
        if self.L <= 2 * self.shell.r:
            raise ParameterError(
                f"L = {self.L} must exceed 2r = {2 * self.shell.r}")
        chain = tuple(tuple(tuple(int(c) for c in pt) for pt in level)
                      for level in self.chain)
        if len(chain) != self.k + 1:
            raise ParameterError("chain must have k+1 levels")
        shell_set = set(self.shell.points)
        prev: set[Point] = set()
        for i, level in enumerate(chain):
            if len(level) != self.p ** (2 * i):
                raise ParameterError(
                    f"chain level {i} has {len(level)} points,"
                    f" needs p^2i = {self.p ** (2 * i)}")
            cur = set(level)
            if len(cur) != len(level):
                raise ParameterError(f"chain level {i} has repeated points")
            if not prev <= cur:
                raise ParameterError(f"chain level {i} does not contain level {i - 1}")
            if not cur <= shell_set:
                raise ParameterError(f"chain level {i} leaves the shell")
            prev = cur
        object.__setattr__(self, "chain", chain)

    @classmethod
    def from_shell(cls, d: int, p: int, k: int, L: int,
                   shell: LatticeShell) -> "ConstructionParams":
        return cls(d, p, k, L, shell, nested_subsets(shell, k, p))

    @property
    def r(self) -> int:
        return self.shell.r

    @property
    def translates(self) -> list[Point]:
        return box_points(1 + self.r, self.L - self.r, self.d)

    @property
    def m(self) -> int:
        return (self.k + 1) * (self.L - 2 * self.r) ** self.d

    @property
    def n(self) -> int:
        return self.L ** self.d


@dataclass(frozen=True)
class LevelSpec:
    """One level of the generalized layout: vectors p^(-i) sum e_{t+y}, y in S_i."""

    index: int
    points: tuple[Point, ...]      # S_i
    translates: tuple[Point, ...]  # T_i, lexicographic


def construction_provenance(params: ConstructionParams) -> dict:
    return {
        "variant": PROVENANCE_CONSTRUCTION,
        "d": params.d,
        "p": params.p,
        "k": params.k,
        "L": params.L,
        "shell": {
            "Rsq": params.shell.radius_sq,
            "points": [list(pt) for pt in params.shell.points],
        },
        "chain_sizes": [len(level) for level in params.chain],
    }


def figure_provenance() -> dict:
    return {"variant": PROVENANCE_FIGURE, "d": 2, "p": 2, "k": 1, "L": 5}


def level_vector(n: int, p: int, k: int, L: int, d: int,
                  level: int, points: Sequence[Point], t: Point) -> ScaledVector:
    numer = p ** (k - level)
    entries = {}
    for y in points:
        x = tuple(tc + yc for tc, yc in zip(t, y))
        entries[coordinate_index(x, L, d)] = numer
    return ScaledVector(n, p, k, entries)


def vectors_for_levels(p: int, k: int, L: int, d: int,
                       levels: Sequence[LevelSpec]) -> list[ScaledVector]:
    n = L ** d
    out = []
    for spec in levels:
        for t in spec.translates:
            out.append(level_vector(n, p, k, L, d, spec.index, spec.points, t))
    return out


def params_levels(params: ConstructionParams) -> list[LevelSpec]:
    translates = tuple(params.translates)
    return [LevelSpec(i, params.chain[i], translates)
            for i in range(params.k + 1)]


def figure_levels() -> list[LevelSpec]:
    basis_translates = tuple(box_points(1, 5, 2))
    inner_translates = tuple(box_points(2, 4, 2))
    return [
        LevelSpec(0, ((0, 0),), basis_translates),
        LevelSpec(1, tuple(sorted(NEIGHBOR_SHELL_2D)), inner_translates),
    ]


def levels_from_provenance(prov: dict) -> tuple[int, int, int, int, list[LevelSpec]]:
    """(d, p, k, L, levels) described by an instance provenance object."""
    if not isinstance(prov, dict) or "variant" not in prov:
        raise ContractViolation("provenance object missing 'variant'")
    variant = prov["variant"]
    if variant == PROVENANCE_FIGURE:
        return 2, 2, 1, 5, figure_levels()
    if variant != PROVENANCE_CONSTRUCTION:
        raise ContractViolation(f"unknown provenance variant '{variant}'")
    for key in ("d", "p", "k", "L", "shell", "chain_sizes"):
        if key not in prov:
            raise ContractViolation(f"provenance missing field '{key}'")
    d, p, k, L = (int(prov[key]) for key in ("d", "p", "k", "L"))
    shell = LatticeShell.from_points(
        [tuple(pt) for pt in prov["shell"]["points"]])
    if shell.radius_sq != int(prov["shell"]["Rsq"]):
        raise ContractViolation("provenance shell Rsq does not match points")
    params = ConstructionParams.from_shell(d, p, k, L, shell)
    sizes = [len(level) for level in params.chain]
    if sizes != [int(s) for s in prov["chain_sizes"]]:
        raise ContractViolation("provenance chain sizes do not match")
    return d, p, k, L, params_levels(params)


def build_instance(params: ConstructionParams) -> UnitVectorFamily:
    """The (k+1)(L-2r)^d unit vectors in R^(L^d) defined by the parameters.

    Vector order is lexicographic in (level, translate); every vector has
    exact unit norm at scale p^k, and provenance is embedded for structural
    verification.
    """
    vectors = vectors_for_levels(params.p, params.k, params.L, params.d,
                                 params_levels(params))
    assert len(vectors) == params.m
    return UnitVectorFamily(tuple(vectors), construction_provenance(params))


def figure_example() -> UnitVectorFamily:
    """34 unit vectors in R^25: 25 basis vectors plus 9 half-neighbor sums.

    The second type sits at the 9 interior points of the 5x5 grid; each such
    vector has value 1/2 on the four lattice neighbors of its point.
    """
    vectors = vectors_for_levels(2, 1, 5, 2, figure_levels())
    assert len(vectors) == 34
    return UnitVectorFamily(tuple(vectors), figure_provenance())


# ---------------------------------------------------------------------------
# Parameter planning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlannedParameters:
    """Derived sizes for a planned instance with D = 2^d and L = floor(2^(lam d))."""

    lam: float
    d: int
    D: int
    L: int
    k: int
    r: int
    shell_size: int
    radius_sq: int
    m: int
    n: int

    @property
    def ratio(self) -> float:
        """m / (n log2 n)."""
        return self.m / (self.n * math.log2(self.n))


def plan_parameters(lam: float, d: int,
                    budget: int = DEFAULT_POINT_BUDGET) -> PlannedParameters:
    """Plan an instance: D = 2^d, the best shell of [-D, D]^d, L = floor(2^(lam d)).

    The chain depth is the largest k with p^2k <= |S| (p = 2).  Shell numbers
    come from exact representation counts; the shell itself is materialized
    only when an instance is actually built.
    """
    if not lam > 1:
        raise ParameterError("growth exponent lambda must be > 1")
    if d < 1:
        raise ParameterError("d must be >= 1")
    D = 2 ** d
    radius_sq, size, r = shell_profile(d, D, budget)
    k = 0
    while 4 ** (k + 1) <= size:
        k += 1
    L = math.floor(2 ** (lam * d))
    if L <= 2 * r:
        raise ParameterError(
            f"d too small: L = {L} does not exceed 2r = {2 * r}"
            f" for lambda = {lam}")
    m = (k + 1) * (L - 2 * r) ** d
    n = L ** d
    return PlannedParameters(lam, d, D, L, k, r, size, radius_sq, m, n)


def params_from_plan(plan: PlannedParameters,
                     budget: int = DEFAULT_POINT_BUDGET) -> ConstructionParams:
    """Materialize the planned shell and chain for actual instance building."""
    shell = find_shell(plan.d, plan.D, budget)
    return ConstructionParams.from_shell(plan.d, 2, plan.k, plan.L, shell)
