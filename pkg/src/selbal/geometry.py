"""Lattice shells and lonely points.

A point of a Minkowski sum C + T is lonely when it has exactly one
representation y + t.  For C in strictly convex position every y in C is
matched by some lonely point; this module decides strict convexity exactly
over the rationals and constructs lonely points deterministically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, ContractViolation, ParameterError

Point = tuple[int, ...]

DEFAULT_POINT_BUDGET = 5_000_000


def _as_points(points: Iterable[Sequence[int]], d: int) -> tuple[Point, ...]:
    out = []
    for pt in points:
        pt = tuple(int(c) for c in pt)
        if len(pt) != d:
            raise ContractViolation(f"point {pt} does not have dimension {d}")
        out.append(pt)
    return tuple(out)


@dataclass(frozen=True)
class PointSet:
    """Finite set of integer points, pairwise distinct."""

    d: int
    points: tuple[Point, ...]

    def __post_init__(self):
        pts = _as_points(self.points, self.d)
        if len(set(pts)) != len(pts):
            raise ContractViolation("points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class LatticeShell:
    """Integer points sharing one squared Euclidean norm radius_sq > 0."""

    d: int
    radius_sq: int
    points: tuple[Point, ...]
    r: int
    box_bound: int

    def __post_init__(self):
        pts = _as_points(self.points, self.d)
        if not pts:
            raise ContractViolation("a shell must contain at least one point")
        if self.radius_sq <= 0:
            raise ContractViolation("shell squared radius must be positive")
        if len(set(pts)) != len(pts):
            raise ContractViolation("shell points must be pairwise distinct")
        for pt in pts:
            if sum(c * c for c in pt) != self.radius_sq:
                raise ContractViolation(
                    f"point {pt} does not have squared norm {self.radius_sq}")
        r = max(max(abs(c) for c in pt) for pt in pts)
        if r != self.r:
            raise ContractViolation(f"stored r={self.r} but max inf-norm is {r}")
        if r > self.box_bound:
            raise ContractViolation("r exceeds the box bound D")
        object.__setattr__(self, "points", tuple(sorted(pts)))

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]],
                    box_bound: int | None = None) -> "LatticeShell":
        pts = [tuple(int(c) for c in p) for p in points]
        if not pts:
            raise ContractViolation("a shell must contain at least one point")
        d = len(pts[0])
        rsq = sum(c * c for c in pts[0])
        r = max(max(abs(c) for c in pt) for pt in pts)
        return cls(d, rsq, tuple(pts), r, box_bound if box_bound is not None else r)

    def __len__(self) -> int:
        return len(self.points)


def _all_equal_norm(points: Sequence[Point]) -> bool:
    norms = {sum(c * c for c in pt) for pt in points}
    return len(norms) == 1 and 0 not in norms


# ---------------------------------------------------------------------------
# Exact separation: phase-1 simplex over Fractions
# ---------------------------------------------------------------------------

def _phase1_feasible(rows: list[list[int]]) -> list[Fraction] | None:
    """Solve `rows . f >= 1` exactly; return a feasible f or None.

    Strict separation f.(y - y') > 0 is scale-invariant, so feasibility of
    the >= 1 system is equivalent.  Free f is split into f+ - f-; a phase-1
    simplex with Bland's rule minimizes the artificial sum.
    """
    if not rows:
        return [Fraction(0)]
    d = len(rows[0])
    nrows = len(rows)
    ncols = 2 * d + 2 * nrows  # f+, f-, slack, artificial
    # tableau rows: [A | -A | -I | I | b], objective = sum of artificials
    tab = []
    for i, row in enumerate(rows):
        line = [Fraction(c) for c in row]
        line += [Fraction(-c) for c in row]
        line += [Fraction(-1) if j == i else Fraction(0) for j in range(nrows)]
        line += [Fraction(1) if j == i else Fraction(0) for j in range(nrows)]
        line.append(Fraction(1))
        tab.append(line)
    basis = [2 * d + nrows + i for i in range(nrows)]
    # objective row for min sum(artificials): reduced costs
    obj = [Fraction(0)] * (ncols + 1)
    for j in range(2 * d + nrows, 2 * d + 2 * nrows):
        obj[j] = Fraction(1)
    for i in range(nrows):  # price out the artificial basis
        for j in range(ncols + 1):
            obj[j] -= tab[i][j]
    while True:
        enter = -1
        for j in range(ncols):  # Bland: first negative reduced cost
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave, best = -1, None
        for i in range(nrows):
            if tab[i][enter] > 0:
                ratio = tab[i][ncols] / tab[i][enter]
                if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave < 0:
            return None  # unbounded phase-1 cannot happen; defensive
        piv = tab[leave][enter]
        tab[leave] = [c / piv for c in tab[leave]]
        for i in range(nrows):
            if i != leave and tab[i][enter]:
                f = tab[i][enter]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[leave])]
        if obj[enter]:
            f = obj[enter]
            obj = [a - f * b for a, b in zip(obj, tab[leave])]
        basis[leave] = enter
    if -obj[ncols] != 0:  # optimal artificial sum nonzero -> infeasible
        return None
    f = [Fraction(0)] * d
    for i, var in enumerate(basis):
        if var < d:
            f[var] += tab[i][ncols]
        elif var < 2 * d:
            f[var - d] -= tab[i][ncols]
    return f


def separating_functional(y: Point, others: Sequence[Point]) -> list[Fraction] | None:
    """Exact rational f with f(y) > f(y') for every y' in others, or None."""
    rows = [[yc - oc for yc, oc in zip(y, other)] for other in others]
    return _phase1_feasible(rows)


def is_strictly_convex(ps: PointSet) -> bool:
    """True iff every point of the set is a vertex of its convex hull.

    Equal-norm sets are strictly convex outright (Cauchy-Schwarz: the inner
    product with y is maximized only at y); other sets fall back to solving
    the separation feasibility problem per point, exactly over rationals.
    """
    if len(ps) == 0:
        raise ContractViolation("point set must be nonempty")
    if len(ps) == 1:
        return True
    if _all_equal_norm(ps.points):
        return True
    for i, y in enumerate(ps.points):
        others = ps.points[:i] + ps.points[i + 1:]
        if separating_functional(y, others) is None:
            return False
    return True


# ---------------------------------------------------------------------------
# Lonely points
# ---------------------------------------------------------------------------

def _check_lemma_inputs(C: PointSet, T: PointSet) -> None:
    if len(C) == 0 or len(T) == 0:
        raise ContractViolation("C and T must be nonempty")
    if C.d != T.d:
        raise ContractViolation("C and T must share one dimension")
    if not is_strictly_convex(C):
        raise ContractViolation("C is not in strictly convex position")


def lonely_points(C: PointSet, T: PointSet) -> list[tuple[Point, Point, Point]]:
    """All lonely points of C + T with their unique representation.

    Returns (x, t, y) triples with x = y + t, sorted lexicographically by x.
    """
    _check_lemma_inputs(C, T)
    reps: dict[Point, list[tuple[Point, Point]]] = {}
    for y in C.points:
        for t in T.points:
            x = tuple(a + b for a, b in zip(y, t))
            reps.setdefault(x, []).append((t, y))
    out = []
    for x in sorted(reps):
        if len(reps[x]) == 1:
            t, y = reps[x][0]
            out.append((x, t, y))
    return out


def lonely_witness_for(y: Point, C: PointSet, T: PointSet) -> tuple[Point, Point]:
    """A lonely point x = y + t for the given y, built from a separator.

    The functional is y itself when C is an equal-norm shell, otherwise an
    exact rational separator.  Among maximizers of the functional over C + T
    the lexicographically smallest x is returned.
    """
    y = tuple(int(c) for c in y)
    if y not in C.points:
        raise ContractViolation(f"{y} is not a point of C")
    _check_lemma_inputs(C, T)
    if _all_equal_norm(C.points):
        f: Sequence = y
    else:
        sep = separating_functional(
            y, [pt for pt in C.points if pt != y])
        if sep is None:
            raise ContractViolation("C is not in strictly convex position")
        f = sep
    best_val = None
    best_x = None
    for yy in C.points:
        for t in T.points:
            x = tuple(a + b for a, b in zip(yy, t))
            val = sum(fc * xc for fc, xc in zip(f, x))
            if best_val is None or val > best_val or (
                    val == best_val and x < best_x):
                best_val, best_x = val, x
    t = tuple(a - b for a, b in zip(best_x, y))
    if t not in set(T.points):
        raise ContractViolation(
            "maximizer does not decompose over y; C is not strictly convex")
    return best_x, t


# ---------------------------------------------------------------------------
# Shell search
# ---------------------------------------------------------------------------

def _square_count_hist(d: int, D: int) -> np.ndarray:
    """hist[s] = number of points in [-D, D]^d with squared norm s (exact)."""
    base = np.zeros(D * D + 1, dtype=np.int64)
    base[0] = 1
    for c in range(1, D + 1):
        base[c * c] = 2
    hist = base.copy()
    for _ in range(d - 1):
        hist = np.convolve(hist, base)
    return hist


def _check_budget(d: int, D: int, budget: int) -> None:
    if d < 1 or D < 1:
        raise ParameterError("need d >= 1 and D >= 1")
    if (2 * D + 1) ** d > budget:
        raise BudgetExceeded(
            f"(2D+1)^d = {(2 * D + 1) ** d} exceeds the enumeration budget"
            f" {budget}")


def _best_class(hist: np.ndarray) -> tuple[int, int]:
    """Maximum-cardinality squared-norm class; ties go to the largest R^2."""
    best_rsq, best_count = 0, 0
    for rsq in range(1, len(hist)):
        c = int(hist[rsq])
        if c > 0 and c >= best_count:
            best_rsq, best_count = rsq, c
    return best_rsq, best_count


def shell_profile(d: int, D: int,
                  budget: int = DEFAULT_POINT_BUDGET) -> tuple[int, int, int]:
    """(radius_sq, cardinality, r) of the shell find_shell would return.

    Computed from exact representation counts without materializing points,
    so it stays cheap for boxes whose full point list would be enormous.
    """
    _check_budget(d, D, budget)
    hist = _square_count_hist(d, D)
    rsq, count = _best_class(hist)
    if d == 1:
        r = math.isqrt(rsq)
    else:
        rest = _square_count_hist(d - 1, D)
        r = max(c for c in range(0, D + 1)
                if c * c <= rsq and rsq - c * c < len(rest)
                and rest[rsq - c * c] > 0)
    return rsq, count, r


def _collect_class(d: int, D: int, rsq: int) -> list[Point]:
    """All points of [-D, D]^d with squared norm rsq, in lexicographic order."""
    out: list[Point] = []
    prefix = [0] * d
    max_tail = [i * D * D for i in range(d + 1)]

    def rec(i: int, remaining: int) -> None:
        if i == d:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        tail = max_tail[d - i - 1]
        for c in range(-D, D + 1):
            rem = remaining - c * c
            if 0 <= rem <= tail:
                prefix[i] = c
                rec(i + 1, rem)

    rec(0, rsq)
    return out


def find_shell(d: int, D: int, budget: int = DEFAULT_POINT_BUDGET) -> LatticeShell:
    """Largest equal-norm class of integer points in [-D, D]^d.

    Buckets all (2D+1)^d points by squared norm and returns a class of
    maximum cardinality (ties resolved toward the largest squared norm,
    matching the ascending scan used to certify instances).  Deterministic:
    points come out lexicographically sorted.
    """
    rsq, count, r = shell_profile(d, D, budget)
    points = _collect_class(d, D, rsq)
    assert len(points) == count
    return LatticeShell(d, rsq, tuple(points), r, D)
