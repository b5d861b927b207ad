"""Decision engines for selective balancing.

A family is selectively balancing when some non-trivial sign combination of
its vectors has Euclidean norm strictly below 1.  Engines decide this
exactly: depth-first enumeration, a meet-in-the-middle search with a spatial
hash over half-sums, a branch-and-bound variant, a seeded random sampler, a
structural verifier that checks the preconditions of the generating layout
instead of searching, and a proof-trace builder that certifies a lower bound
for one sign combination via lonely points.

Enumeration is canonical: the first nonzero coefficient is fixed to +1,
halving the space to (3^m - 1) / 2 since the norm is even in the signs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import construction as _con
from .errors import (ArithmeticOverflow, BudgetExceeded, ContractViolation,
                     PreconditionFailure)
from .geometry import PointSet, is_strictly_convex, lonely_witness_for
from .vectorspace import (ScaledVector, SignVector, UnitVectorFamily, combine,
                          coordinate_index, norm_sq_scaled)

DEFAULT_BUDGET = 1_000_000
DEFAULT_MITM_BUDGET = 2_000_000

BALANCING = "balancing"
NOT_BALANCING = "not_balancing"
INCONCLUSIVE = "inconclusive"
BOUNDARY_INCONCLUSIVE = "boundary_inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one engine run.

    For a balancing verdict ``witness`` is a valid sign combination and
    ``norm_sq_scaled`` its exact squared norm at scale p^2k.  For a
    not-balancing verdict from a search engine, ``min_norm_sq_scaled`` is the
    exact minimum over all non-trivial combinations and ``witness`` a
    combination attaining it; the structural method carries no minimum (the
    argument only proves norm >= 1).
    """

    kind: str
    method: str
    scale_sq: int | float
    witness: tuple[int, ...] | None = None
    norm_sq_scaled: int | float | None = None
    min_norm_sq_scaled: int | float | None = None
    explored: int = 0
    budget: int | None = None

    @property
    def is_balancing(self) -> bool:
        return self.kind == BALANCING

    @property
    def is_not_balancing(self) -> bool:
        return self.kind == NOT_BALANCING

    @property
    def is_definitive(self) -> bool:
        return self.kind in (BALANCING, NOT_BALANCING)

    def to_dict(self) -> dict:
        return {
            "verdict": self.kind,
            "method": self.method,
            "witness": list(self.witness) if self.witness is not None else None,
            "norm_sq_scaled": self.norm_sq_scaled,
            "min_norm_sq_scaled": self.min_norm_sq_scaled,
            "scale_sq": self.scale_sq,
            "explored": self.explored,
            "budget": self.budget,
        }


@dataclass(frozen=True)
class ProofTrace:
    """Re-enactment of the lower-bound argument for one sign combination.

    ``level`` is the largest layout level with a nonzero coefficient;
    ``certified`` lists (coordinate index, lattice point, exact numerator)
    for at least p^(2*level) lonely coordinates where the component magnitude
    is at least p^(-level); every numerator is re-checked exactly.
    """

    level: int
    supports: dict[int, tuple[tuple[int, ...], ...]]
    certified: tuple[tuple[int, tuple[int, ...], int], ...]
    p: int
    k: int

    @property
    def count(self) -> int:
        return len(self.certified)

    @property
    def lower_bound_norm_sq_scaled(self) -> int:
        """count * p^(2(k - level)): a certified lower bound on the scaled norm^2."""
        return self.count * self.p ** (2 * (self.k - self.level))


class _BudgetHit(Exception):
    pass


def _supports(family: UnitVectorFamily) -> list[tuple[tuple[int, int], ...]]:
    return [tuple(sorted(v.entries.items())) for v in family.vectors]


def _search(family: UnitVectorFamily, budget: int, prune: bool,
            collect_norm: int | None = None):
    """Canonical depth-first enumeration shared by exhaustive and b&b.

    Children are visited in the order -1, 0, +1 (0, +1 while the prefix is
    all zero), which is exactly lexicographic order over canonical sign
    vectors; the first witness found is therefore the lexicographically
    smallest one.  The running sum and its squared norm are updated
    incrementally per coefficient, in time proportional to that vector's
    support.

    With ``prune`` set, a subtree is skipped when even the best completion
    provably cannot reach the current best squared norm: in scaled units,
    sqrt(Q) >= sqrt(B) + R*p^k, decided exactly over integers.

    Returns (witness, witness_norm, best_sq, best_eps, candidates, nodes,
    collected) where collected gathers canonical eps with norm^2 equal to
    ``collect_norm`` when requested.
    """
    sup = _supports(family)
    m = family.m
    scale_sq = family.scale_sq
    pk = family.p ** family.k
    acc = [0] * family.n
    coeffs = [0] * m
    state = {"normsq": 0, "cand": 0, "nodes": 0,
             "best_sq": None, "best_eps": None,
             "witness": None, "wit_norm": None}
    collected: list[tuple[int, ...]] = []

    def leaf(any_nz: bool) -> bool:
        if not any_nz:
            return False
        if state["cand"] >= budget:
            raise _BudgetHit
        state["cand"] += 1
        q = state["normsq"]
        if collect_norm is not None and q == collect_norm:
            collected.append(tuple(coeffs))
        if q < scale_sq:
            state["witness"] = tuple(coeffs)
            state["wit_norm"] = q
            return True
        if state["best_sq"] is None or q < state["best_sq"]:
            state["best_sq"] = q
            state["best_eps"] = tuple(coeffs)
        return False

    def rec(i: int, any_nz: bool) -> bool:
        if i == m:
            return leaf(any_nz)
        for val in (-1, 0, 1) if any_nz else (0, 1):
            state["nodes"] += 1
            if prune and state["nodes"] > budget:
                raise _BudgetHit
            if val == 0:
                coeffs[i] = 0
                if rec(i + 1, any_nz):
                    return True
                continue
            normsq = state["normsq"]
            for c, u in sup[i]:
                old = acc[c]
                new = old + val * u
                normsq += new * new - old * old
                acc[c] = new
            state["normsq"] = normsq
            coeffs[i] = val
            skip = False
            if prune and state["best_sq"] is not None:
                cap = (m - i - 1) * pk
                delta = normsq - state["best_sq"] - cap * cap
                if delta >= 0 and delta * delta >= 4 * cap * cap * state["best_sq"]:
                    skip = True
            if not skip and rec(i + 1, True):
                return True
            for c, u in sup[i]:
                old = acc[c]
                new = old - val * u
                state["normsq"] += new * new - old * old
                acc[c] = new
        coeffs[i] = 0
        return False

    try:
        rec(0, False)
        exhausted = True
    except _BudgetHit:
        exhausted = False
    return (state["witness"], state["wit_norm"], state["best_sq"],
            state["best_eps"], state["cand"], state["nodes"], collected,
            exhausted)


def solve_exhaustive(family: UnitVectorFamily,
                     budget: int = DEFAULT_BUDGET) -> Verdict:
    """Enumerate all (3^m - 1)/2 canonical sign vectors.

    Returns the first balancing witness in lexicographic order, otherwise the
    exact minimum squared norm with a combination attaining it, or an
    inconclusive verdict when the candidate budget runs out.
    """
    if family.m < 1:
        raise ContractViolation("family must contain at least one vector")
    wit, wit_norm, best_sq, best_eps, cand, _nodes, _c, done = _search(
        family, budget, prune=False)
    if wit is not None:
        return Verdict(BALANCING, "exhaustive", family.scale_sq,
                       witness=wit, norm_sq_scaled=wit_norm,
                       explored=cand, budget=budget)
    if not done:
        return Verdict(INCONCLUSIVE, "exhaustive", family.scale_sq,
                       explored=cand, budget=budget)
    return Verdict(NOT_BALANCING, "exhaustive", family.scale_sq,
                   witness=best_eps, min_norm_sq_scaled=best_sq,
                   explored=cand, budget=budget)


def solve_branch_bound(family: UnitVectorFamily,
                       budget: int = DEFAULT_BUDGET) -> Verdict:
    """Depth-first search that prunes subtrees unable to beat the best norm.

    The bound max(0, ||partial|| - #remaining)^2, compared against the best
    complete combination seen so far, is evaluated exactly over integers, so
    no feasible branch is ever pruned; the verdict (including the exact
    minimum) matches the exhaustive engine whenever the node budget suffices.
    """
    if family.m < 1:
        raise ContractViolation("family must contain at least one vector")
    wit, wit_norm, best_sq, best_eps, _cand, nodes, _c, done = _search(
        family, budget, prune=True)
    if wit is not None:
        return Verdict(BALANCING, "branch_bound", family.scale_sq,
                       witness=wit, norm_sq_scaled=wit_norm,
                       explored=nodes, budget=budget)
    if not done:
        return Verdict(INCONCLUSIVE, "branch_bound", family.scale_sq,
                       explored=nodes, budget=budget)
    return Verdict(NOT_BALANCING, "branch_bound", family.scale_sq,
                   witness=best_eps, min_norm_sq_scaled=best_sq,
                   explored=nodes, budget=budget)


def boundary_combinations(family: UnitVectorFamily,
                          budget: int = DEFAULT_BUDGET) -> list[SignVector]:
    """Canonical sign vectors whose combination has norm exactly 1."""
    _w, _wn, _b, _be, _cand, _nodes, collected, done = _search(
        family, budget, prune=False, collect_norm=family.scale_sq)
    if not done:
        raise BudgetExceeded(
            f"enumeration of norm-1 combinations exceeded budget {budget}")
    return [SignVector(c) for c in collected]


# ---------------------------------------------------------------------------
# Meet in the middle
# ---------------------------------------------------------------------------

def _dense_matrix(family: UnitVectorFamily, rows: Sequence[int]) -> np.ndarray:
    mat = np.zeros((len(rows), family.n), dtype=np.int64)
    for out_row, idx in enumerate(rows):
        for c, a in family.vectors[idx].entries.items():
            mat[out_row, c] = a
    return mat


def _int64_safe(family: UnitVectorFamily) -> bool:
    worst = family.m * family.p ** family.k
    return family.n * worst * worst < 2 ** 62


def _half_sums(vmat: np.ndarray) -> np.ndarray:
    """Signed sums over all eps in {-1,0,1}^size, row index = lex rank of eps."""
    size, n = vmat.shape
    total = 3 ** size
    sums = np.zeros((total, n), dtype=vmat.dtype)
    for j in range(size):
        reps = 3 ** (size - 1 - j)
        coeff = np.tile(np.repeat(np.array([-1, 0, 1], dtype=vmat.dtype), reps),
                        3 ** j)
        sums += coeff[:, None] * vmat[j][None, :]
    return sums


def _eps_of_rank(rank: int, size: int) -> tuple[int, ...]:
    digits = []
    for _ in range(size):
        digits.append(rank % 3 - 1)
        rank //= 3
    return tuple(reversed(digits))


def solve_mitm(family: UnitVectorFamily, cell_side: float | None = None,
               budget: int = DEFAULT_MITM_BUDGET) -> Verdict:
    """Split the family in half and match partial sums through a cell grid.

    All 3^|A| and 3^|B| half-sums are formed exactly; the stored half is
    hashed into cells of the given side (default 1 / sqrt(n + 1)) and, for
    every streamed sum a, only cells near -a are probed for witnesses.  Every
    candidate is verified exactly before being reported.  When no witness
    exists, the exact minimum over all pairs is computed so the verdict
    matches the exhaustive engine.
    """
    if family.m < 2:
        raise ContractViolation("meet-in-the-middle needs at least 2 vectors")
    n = family.n
    pk = family.p ** family.k
    scale_sq = family.scale_sq
    if cell_side is None:
        cell_side = 1.0 / math.sqrt(n + 1)
    if not cell_side > 0:
        raise ContractViolation("cell side must be positive")
    size_b = family.m // 2
    size_a = family.m - size_b
    if 3 ** size_b > budget:
        return Verdict(INCONCLUSIVE, "mitm", scale_sq, explored=0,
                       budget=budget)
    if not _int64_safe(family):
        raise ArithmeticOverflow(
            "mitm fast path would exceed 64-bit capacity for this family")
    a_mat = _dense_matrix(family, range(size_a))
    b_mat = _dense_matrix(family, range(size_a, family.m))
    sums_a = _half_sums(a_mat)
    sums_b = _half_sums(b_mat)
    explored = len(sums_a) + len(sums_b)
    zero_a = (3 ** size_a - 1) // 2
    zero_b = (3 ** size_b - 1) // 2

    unit = pk * cell_side
    keys_b = np.floor(sums_b / unit).astype(np.int64)
    probe_radius = math.ceil(1.0 / cell_side) + 1

    def make_eps(ia: int, ib: int) -> tuple[int, ...]:
        return _eps_of_rank(ia, size_a) + _eps_of_rank(ib, size_b)

    for ia in range(len(sums_a)):
        a = sums_a[ia]
        target = np.floor(-a / unit).astype(np.int64)
        near = np.abs(keys_b - target).max(axis=1) <= probe_radius
        rows = np.flatnonzero(near)
        if not rows.size:
            continue
        cand = sums_b[rows] + a
        norms = np.einsum("ij,ij->i", cand, cand)
        for pos in np.flatnonzero(norms < scale_sq):
            ib = int(rows[int(pos)])
            if ia == zero_a and ib == zero_b:
                continue
            eps = SignVector(make_eps(ia, ib)).canonical().coeffs
            return Verdict(BALANCING, "mitm", scale_sq, witness=eps,
                           norm_sq_scaled=int(norms[int(pos)]),
                           explored=explored, budget=budget)

    # no witness: exact minimum over all non-trivial pairs
    best_sq = None
    best_pair = None
    chunk = max(1, 4_000_000 // max(1, len(sums_b)))
    for start in range(0, len(sums_a), chunk):
        block = sums_a[start:start + chunk]
        pair = block[:, None, :] + sums_b[None, :, :]
        norms = np.einsum("abj,abj->ab", pair, pair)
        if start <= zero_a < start + len(block):
            norms[zero_a - start, zero_b] = np.iinfo(np.int64).max
        flat = int(np.argmin(norms))
        val = int(norms.flat[flat])
        if best_sq is None or val < best_sq:
            best_sq = val
            best_pair = (start + flat // len(sums_b), flat % len(sums_b))
    eps = SignVector(make_eps(*best_pair)).canonical().coeffs
    return Verdict(NOT_BALANCING, "mitm", scale_sq, witness=eps,
                   min_norm_sq_scaled=best_sq, explored=explored,
                   budget=budget)


# ---------------------------------------------------------------------------
# Random sampling
# ---------------------------------------------------------------------------

def sample_random(family: UnitVectorFamily, trials: int, seed: int) -> Verdict:
    """Draw non-trivial sign vectors uniformly; report the first witness.

    Deterministic for a given seed.  Returns inconclusive after the requested
    number of trials without a witness.
    """
    if trials < 1:
        raise ContractViolation("trials must be >= 1")
    if not _int64_safe(family):
        raise ArithmeticOverflow(
            "sampling fast path would exceed 64-bit capacity for this family")
    rng = np.random.default_rng(seed)
    m, n, scale_sq = family.m, family.n, family.scale_sq
    vmat = _dense_matrix(family, range(m))
    chunk = max(1, min(trials, 4_000_000 // max(1, n)))
    consumed = 0
    while consumed < trials:
        take = min(chunk, trials - consumed)
        signs = rng.integers(-1, 2, size=(take, m), dtype=np.int64)
        alive = signs.any(axis=1)
        while not alive.all():  # uniform over non-trivial draws
            dead = np.flatnonzero(~alive)
            signs[dead] = rng.integers(-1, 2, size=(len(dead), m),
                                       dtype=np.int64)
            alive[dead] = signs[dead].any(axis=1)
        sums = signs @ vmat
        norms = np.einsum("ij,ij->i", sums, sums)
        hits = np.flatnonzero(norms < scale_sq)
        if hits.size:
            h = int(hits[0])
            eps = tuple(int(c) for c in signs[h])
            return Verdict(BALANCING, "sample", scale_sq, witness=eps,
                           norm_sq_scaled=int(norms[h]),
                           explored=consumed + h + 1, budget=trials)
        consumed += take
    return Verdict(INCONCLUSIVE, "sample", scale_sq, explored=trials,
                   budget=trials)


# ---------------------------------------------------------------------------
# Structural verification
# ---------------------------------------------------------------------------

def _provenance_levels(family: UnitVectorFamily):
    if family.provenance is None:
        raise ContractViolation("family carries no construction provenance")
    return _con.levels_from_provenance(family.provenance)


def structural_verify(family: UnitVectorFamily) -> Verdict:
    """Conclude not-balancing by checking the generating layout, not by search.

    Re-derives every precondition of the lower-bound argument: equal-norm
    strictly convex level sets of the right cardinalities, translate ranges
    inside the coordinate box, and bit-exact agreement of every vector with
    the layout formula.  Any failure raises a PreconditionFailure naming the
    check; it never produces a balancing verdict.
    """
    try:
        d, p, k, L, levels = _provenance_levels(family)
    except ContractViolation:
        raise
    except Exception as exc:  # malformed shell / chain in provenance
        raise PreconditionFailure("provenance consistency", str(exc))
    if family.p != p or family.k != k:
        raise PreconditionFailure(
            "scale match",
            f"family scale ({family.p}, {family.k}) != provenance ({p}, {k})")
    if family.n != L ** d:
        raise PreconditionFailure(
            "dimension match", f"family n = {family.n}, layout needs {L ** d}")
    expected_m = sum(len(spec.translates) for spec in levels)
    if family.m != expected_m:
        raise PreconditionFailure(
            "vector count", f"family m = {family.m}, layout needs {expected_m}")
    pos = 0
    for spec in levels:
        if len(spec.points) != p ** (2 * spec.index):
            raise PreconditionFailure(
                "level cardinality",
                f"level {spec.index} has {len(spec.points)} points,"
                f" needs {p ** (2 * spec.index)}")
        if not is_strictly_convex(PointSet(d, spec.points)):
            raise PreconditionFailure(
                "level strict convexity", f"level {spec.index}")
        for t in spec.translates:
            try:
                want = _con.level_vector(family.n, p, k, L, d,
                                          spec.index, spec.points, t)
            except ContractViolation as exc:
                raise PreconditionFailure("support containment", str(exc))
            if family.vectors[pos].entries != want.entries:
                raise PreconditionFailure(
                    "vector formula mismatch",
                    f"vector {pos} (level {spec.index}, translate {t})")
            pos += 1
    return Verdict(NOT_BALANCING, "structural", family.scale_sq,
                   explored=family.m)


def explain_lower_bound(family: UnitVectorFamily, eps) -> ProofTrace:
    """Certify coordinates forcing norm >= 1 for one sign combination.

    Splits the combination by layout level, finds the deepest nonzero level
    j, and produces one lonely coordinate per level-j generator point; at
    those coordinates the level-j part contributes exactly +-p^(-j) while
    shallower levels contribute multiples of p * p^(-j), so the component
    magnitude stays >= p^(-j).  Every certified component is re-evaluated
    exactly.
    """
    coeffs = SignVector(tuple(eps)).coeffs if not isinstance(eps, SignVector) \
        else eps.coeffs
    if all(c == 0 for c in coeffs):
        raise ContractViolation("sign combination must be non-trivial")
    d, p, k, L, levels = _provenance_levels(family)
    if len(coeffs) != family.m:
        raise ContractViolation("sign vector length differs from family size")
    v_full = combine(family, coeffs)
    pos = 0
    blocks = []
    for spec in levels:
        width = len(spec.translates)
        blocks.append((spec, coeffs[pos:pos + width]))
        pos += width
    supports: dict[int, tuple] = {}
    deepest = None
    for spec, block in blocks:
        supp = tuple(t for t, c in zip(spec.translates, block) if c)
        supports[spec.index] = supp
        if supp:
            deepest = (spec, block)
    spec_j, block_j = deepest
    j = spec_j.index
    v_level: dict[int, int] = {}
    numer = p ** (k - j)
    for t, c in zip(spec_j.translates, block_j):
        if not c:
            continue
        for y in spec_j.points:
            x = tuple(tc + yc for tc, yc in zip(t, y))
            idx = coordinate_index(x, L, d)
            v_level[idx] = v_level.get(idx, 0) + c * numer
    C = PointSet(d, spec_j.points)
    T = PointSet(d, supports[j])
    certified = []
    seen = set()
    for y in spec_j.points:
        x, _t = lonely_witness_for(y, C, T)
        idx = coordinate_index(x, L, d)
        if v_level.get(idx, 0) not in (numer, -numer):
            raise PreconditionFailure(
                "lonely component value",
                f"coordinate {x} has level-{j} numerator {v_level.get(idx, 0)}")
        full = v_full.entries.get(idx, 0)
        if abs(full) < numer:
            raise PreconditionFailure(
                "certified component magnitude",
                f"coordinate {x} has |numerator| {abs(full)} < {numer}")
        if idx in seen:
            raise PreconditionFailure(
                "lonely coordinate uniqueness", f"coordinate {x} repeated")
        seen.add(idx)
        certified.append((idx, x, full))
    trace = ProofTrace(j, supports, tuple(certified), p, k)
    assert trace.count >= p ** (2 * j)
    return trace


# ---------------------------------------------------------------------------
# Floating-point input path
# ---------------------------------------------------------------------------

def solve_float(vectors: Sequence[Sequence[float]], tolerance: float = 1e-9,
                budget: int = DEFAULT_BUDGET) -> Verdict:
    """Exhaustive search over float vectors with an explicit tolerance band.

    Verdicts whose deciding squared norm falls within ``tolerance`` of 1 are
    reported as boundary-inconclusive instead of guessed: the balancing
    predicate is a strict inequality, and float inputs cannot certify it at
    the boundary.
    """
    vecs = [tuple(float(c) for c in v) for v in vectors]
    if not vecs:
        raise ContractViolation("need at least one vector")
    n = len(vecs[0])
    if any(len(v) != n for v in vecs):
        raise ContractViolation("vectors must share one dimension")
    if not 0 <= tolerance < 1:
        raise ContractViolation("tolerance must be in [0, 1)")
    m = len(vecs)
    acc = [0.0] * n
    coeffs = [0] * m
    state = {"cand": 0, "best": None, "best_eps": None,
             "witness": None, "wit_norm": None}

    def rec(i: int, any_nz: bool) -> bool:
        if i == m:
            if not any_nz:
                return False
            if state["cand"] >= budget:
                raise _BudgetHit
            state["cand"] += 1
            q = sum(a * a for a in acc)
            if q < 1.0 - tolerance:
                state["witness"] = tuple(coeffs)
                state["wit_norm"] = q
                return True
            if state["best"] is None or q < state["best"]:
                state["best"] = q
                state["best_eps"] = tuple(coeffs)
            return False
        for val in (-1, 0, 1) if any_nz else (0, 1):
            coeffs[i] = val
            if val:
                for c, u in enumerate(vecs[i]):
                    acc[c] += val * u
            if rec(i + 1, any_nz or val != 0):
                return True
            if val:
                for c, u in enumerate(vecs[i]):
                    acc[c] -= val * u
        coeffs[i] = 0
        return False

    try:
        rec(0, False)
    except _BudgetHit:
        return Verdict(INCONCLUSIVE, "exhaustive_float", 1.0,
                       explored=state["cand"], budget=budget)
    if state["witness"] is not None:
        return Verdict(BALANCING, "exhaustive_float", 1.0,
                       witness=state["witness"],
                       norm_sq_scaled=state["wit_norm"],
                       explored=state["cand"], budget=budget)
    if state["best"] > 1.0 + tolerance:
        return Verdict(NOT_BALANCING, "exhaustive_float", 1.0,
                       witness=state["best_eps"],
                       min_norm_sq_scaled=state["best"],
                       explored=state["cand"], budget=budget)
    return Verdict(BOUNDARY_INCONCLUSIVE, "exhaustive_float", 1.0,
                   witness=state["best_eps"],
                   min_norm_sq_scaled=state["best"],
                   explored=state["cand"], budget=budget)


ENGINES = {
    "exhaustive": solve_exhaustive,
    "bb": solve_branch_bound,
    "mitm": solve_mitm,
}
