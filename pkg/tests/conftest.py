"""Shared fixtures and independent oracles for the test suite.

Oracles here deliberately avoid the library's own arithmetic paths: sign
combinations are accumulated through Fractions, representation counts go
through collections.Counter, and hull membership is decided by brute-force
simplex enumeration.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import combinations, product

import pytest

from selbal.construction import ConstructionParams, NEIGHBOR_SHELL_2D, build_instance
from selbal.geometry import LatticeShell


@pytest.fixture(scope="session")
def neighbor_shell() -> LatticeShell:
    return LatticeShell.from_points(NEIGHBOR_SHELL_2D, box_bound=1)


@pytest.fixture(scope="session")
def flagship_l4(neighbor_shell):
    """d=2, p=2, k=1, L=4 instance: 8 vectors in R^16."""
    return build_instance(
        ConstructionParams.from_shell(2, 2, 1, 4, neighbor_shell))


@pytest.fixture(scope="session")
def instance_l5(neighbor_shell):
    """d=2, p=2, k=1, L=5 instance: 18 vectors in R^25."""
    return build_instance(
        ConstructionParams.from_shell(2, 2, 1, 5, neighbor_shell))


def oracle_combination_values(family, eps) -> dict[int, Fraction]:
    """Component map of sum(eps_i u_i) built through Fractions."""
    acc: dict[int, Fraction] = {}
    for coeff, vec in zip(eps, family.vectors):
        if not coeff:
            continue
        scale = vec.p ** vec.k
        for idx, num in vec.entries.items():
            acc[idx] = acc.get(idx, Fraction(0)) + Fraction(coeff * num, scale)
    return {idx: val for idx, val in acc.items() if val}


def oracle_norm_sq(family, eps) -> Fraction:
    return sum((v * v for v in oracle_combination_values(family, eps).values()),
               Fraction(0))


def oracle_representation_counts(C, T) -> Counter:
    counts: Counter = Counter()
    for y in C:
        for t in T:
            counts[tuple(a + b for a, b in zip(y, t))] += 1
    return counts


def _solve_barycentric(simplex, y) -> bool:
    """Whether y lies in the convex hull of the given affinely indexed points.

    Solves sum(l_i s_i) = y, sum(l_i) = 1 exactly; true iff all l_i >= 0.
    """
    d = len(y)
    rows = len(simplex)
    mat = [[Fraction(simplex[j][i]) for j in range(rows)] + [Fraction(y[i])]
           for i in range(d)]
    mat.append([Fraction(1)] * rows + [Fraction(1)])
    # Gaussian elimination with partial (first nonzero) pivoting
    pivot_cols = []
    row = 0
    for col in range(rows):
        sel = None
        for r in range(row, len(mat)):
            if mat[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        mat[row], mat[sel] = mat[sel], mat[row]
        pv = mat[row][col]
        mat[row] = [c / pv for c in mat[row]]
        for r in range(len(mat)):
            if r != row and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[row])]
        pivot_cols.append(col)
        row += 1
    for r in range(row, len(mat)):
        if mat[r][-1] != 0:
            return False  # inconsistent: y not in affine span
    lam = [Fraction(0)] * rows
    for r, col in enumerate(pivot_cols):
        lam[col] = mat[r][-1]
    # free variables are zero; check feasibility of this particular solution
    if any(v < 0 for v in lam):
        return False
    # verify (guards against free-variable choices that miss a solution)
    for i in range(d):
        if sum(lam[j] * simplex[j][i] for j in range(rows)) != y[i]:
            return False
    return sum(lam) == 1


def oracle_in_hull(y, points) -> bool:
    """Caratheodory: y in conv(points) iff inside some simplex of <= d+1 points."""
    d = len(y)
    pts = [tuple(p) for p in points]
    if tuple(y) in pts:
        return True
    for size in range(1, d + 2):
        for simplex in combinations(pts, size):
            if _solve_barycentric(simplex, tuple(y)):
                return True
    return False


def oracle_is_strictly_convex(points) -> bool:
    pts = [tuple(p) for p in points]
    return all(not oracle_in_hull(y, [q for q in pts if q != y]) for y in pts)


def naive_shell_classes(d: int, D: int) -> dict[int, list[tuple[int, ...]]]:
    out: dict[int, list[tuple[int, ...]]] = {}
    for pt in product(range(-D, D + 1), repeat=d):
        norm = sum(c * c for c in pt)
        if norm:
            out.setdefault(norm, []).append(pt)
    return out
