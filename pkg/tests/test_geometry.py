"""Strict convexity, lonely points, and shell search."""
from __future__ import annotations

import math
from random import Random

import pytest

from selbal.errors import BudgetExceeded, ContractViolation
from selbal.geometry import (LatticeShell, PointSet, find_shell,
                             is_strictly_convex, lonely_points,
                             lonely_witness_for, separating_functional,
                             shell_profile)

from conftest import (naive_shell_classes, oracle_is_strictly_convex,
                      oracle_representation_counts)


def random_shell_subset(rng: Random, max_size: int = 12) -> PointSet:
    """Random subset of an equal-norm class: strictly convex by construction."""
    d = rng.choice([2, 3])
    D = rng.randint(1, 5)
    classes = naive_shell_classes(d, D)
    pts = classes[rng.choice(sorted(classes))]
    size = rng.randint(1, min(max_size, len(pts)))
    return PointSet(d, tuple(rng.sample(pts, size)))


class TestStrictConvexity:
    def test_equal_norm_cross(self):
        assert is_strictly_convex(PointSet(2, ((1, 0), (-1, 0), (0, 1), (0, -1))))

    def test_collinear_middle_point(self):
        assert not is_strictly_convex(PointSet(2, ((0, 0), (1, 0), (2, 0))))

    def test_any_shell_is_strictly_convex(self):
        for d, D in ((1, 2), (2, 3), (3, 2)):
            shell = find_shell(d, D)
            assert is_strictly_convex(PointSet(d, shell.points))

    def test_interior_point_detected_via_lp(self):
        # not equal-norm, so the separation LP path runs
        assert not is_strictly_convex(
            PointSet(2, ((0, 0), (3, 0), (0, 3), (3, 3), (1, 1))))

    def test_non_equal_norm_strictly_convex_via_lp(self):
        assert is_strictly_convex(PointSet(2, ((0, 0), (3, 0), (0, 2))))

    def test_agrees_with_hull_vertex_oracle(self):
        rng = Random(41)
        cases = 0
        while cases < 60:
            d = rng.choice([2, 3])
            size = rng.randint(1, 8)
            pts = set()
            while len(pts) < size:
                pts.add(tuple(rng.randint(-3, 3) for _ in range(d)))
            ps = PointSet(d, tuple(pts))
            assert is_strictly_convex(ps) == oracle_is_strictly_convex(ps.points)
            cases += 1

    def test_separator_separates(self):
        rng = Random(43)
        for _ in range(30):
            ps = random_shell_subset(rng, max_size=8)
            for y in ps.points:
                others = [q for q in ps.points if q != y]
                f = separating_functional(y, others)
                assert f is not None
                fy = sum(a * b for a, b in zip(f, y))
                assert all(fy > sum(a * b for a, b in zip(f, q))
                           for q in others)


class TestLonelyPoints:
    def test_single_translate_everything_lonely(self):
        C = PointSet(2, ((1, 0), (-1, 0), (0, 1), (0, -1)))
        T = PointSet(2, ((3, 4),))
        lp = lonely_points(C, T)
        assert len(lp) == len(C)
        assert all(t == (3, 4) for _x, t, _y in lp)

    def test_cross_with_two_translates(self):
        # every one of the 8 sums is distinct here, so all are lonely;
        # in particular (2,0) = (1,0) + (1,0) and (-1,0) = (-1,0) + (0,0)
        C = PointSet(2, ((1, 0), (-1, 0), (0, 1), (0, -1)))
        T = PointSet(2, ((0, 0), (1, 0)))
        lp = lonely_points(C, T)
        counts = oracle_representation_counts(C.points, T.points)
        assert {x for x, _t, _y in lp} == \
            {x for x, c in counts.items() if c == 1}
        by_x = {x: (t, y) for x, t, y in lp}
        assert by_x[(2, 0)] == ((1, 0), (1, 0))
        assert by_x[(-1, 0)] == ((0, 0), (-1, 0))

    def test_non_lonely_points_excluded(self):
        # two translates along an edge direction create double representations
        C = PointSet(2, ((0, 0), (1, 0), (0, 1)))
        T = PointSet(2, ((0, 0), (1, 0)))
        counts = oracle_representation_counts(C.points, T.points)
        assert counts[(1, 0)] == 2
        lonely = {x for x, _t, _y in lonely_points(C, T)}
        assert (1, 0) not in lonely
        assert lonely == {x for x, c in counts.items() if c == 1}

    def test_matches_brute_force_on_random_inputs(self):
        rng = Random(47)
        for _ in range(40):
            C = random_shell_subset(rng)
            size_t = rng.randint(1, 12)
            tset = set()
            while len(tset) < size_t:
                tset.add(tuple(rng.randint(-5, 5) for _ in range(C.d)))
            T = PointSet(C.d, tuple(tset))
            counts = oracle_representation_counts(C.points, T.points)
            got = lonely_points(C, T)
            assert {x for x, _t, _y in got} == \
                {x for x, c in counts.items() if c == 1}
            for x, t, y in got:
                assert tuple(a + b for a, b in zip(y, t)) == x

    def test_requires_strict_convexity(self):
        C = PointSet(2, ((0, 0), (1, 0), (2, 0)))
        T = PointSet(2, ((0, 0),))
        with pytest.raises(ContractViolation):
            lonely_points(C, T)


class TestLonelyWitness:
    def test_single_translate(self):
        C = PointSet(2, ((1, 0), (-1, 0), (0, 1), (0, -1)))
        T = PointSet(2, ((2, 5),))
        for y in C.points:
            x, t = lonely_witness_for(y, C, T)
            assert t == (2, 5)
            assert x == (y[0] + 2, y[1] + 5)

    def test_worked_case(self):
        C = PointSet(2, ((1, 0), (-1, 0), (0, 1), (0, -1)))
        T = PointSet(2, ((0, 0), (1, 0)))
        x, t = lonely_witness_for((1, 0), C, T)
        assert (x, t) == ((2, 0), (1, 0))

    def test_witness_appears_in_lonely_points(self):
        rng = Random(53)
        for _ in range(50):
            C = random_shell_subset(rng)
            tset = set()
            for _i in range(rng.randint(1, 10)):
                tset.add(tuple(rng.randint(-4, 4) for _ in range(C.d)))
            T = PointSet(C.d, tuple(tset))
            lonely = {x: (t, y) for x, t, y in lonely_points(C, T)}
            y = rng.choice(C.points)
            x, t = lonely_witness_for(y, C, T)
            assert x in lonely
            assert lonely[x] == (t, y)

    def test_y_must_be_in_c(self):
        C = PointSet(2, ((1, 0), (0, 1)))
        T = PointSet(2, ((0, 0),))
        with pytest.raises(ContractViolation):
            lonely_witness_for((5, 5), C, T)


class TestFindShell:
    def test_d1_small_box(self):
        # both nonzero classes have two points; the tie goes to the larger
        # squared norm (the ascending certification scan keeps the last max)
        shell = find_shell(1, 2)
        assert len(shell) == 2
        assert shell.points == ((-2,), (2,))
        assert shell.r == 2

    def test_d2_box4_is_the_norm25_shell(self):
        shell = find_shell(2, 4)
        assert shell.radius_sq == 25
        assert set(shell.points) == {(3, 4), (4, 3), (-3, 4), (3, -4),
                                     (-3, -4), (-4, 3), (4, -3), (-4, -3)}
        assert shell.r == 4

    def test_cardinality_is_maximal(self):
        for d in (1, 2, 3):
            for D in range(1, 9 if d < 3 else 7):
                classes = naive_shell_classes(d, D)
                best = max(len(v) for v in classes.values())
                shell = find_shell(d, D)
                assert len(shell) == best
                assert len(classes[shell.radius_sq]) == best
                # largest squared norm among the maximum-cardinality classes
                assert shell.radius_sq == max(
                    r for r, v in classes.items() if len(v) == best)

    def test_pigeonhole_bound(self):
        for d in (1, 2, 3):
            for D in range(1, 9):
                bound = math.ceil(((2 * D + 1) ** d - 1) / (d * D * D))
                assert len(find_shell(d, D)) >= bound

    def test_points_sorted_and_on_shell(self):
        shell = find_shell(3, 4)
        assert list(shell.points) == sorted(shell.points)
        assert all(sum(c * c for c in pt) == shell.radius_sq
                   for pt in shell.points)

    def test_determinism(self):
        assert find_shell(3, 5) == find_shell(3, 5)

    def test_profile_matches_materialized(self):
        for d, D in ((1, 4), (2, 6), (3, 5), (4, 3)):
            rsq, size, r = shell_profile(d, D)
            shell = find_shell(d, D)
            assert (rsq, size, r) == \
                (shell.radius_sq, len(shell), shell.r)

    def test_budget_error(self):
        with pytest.raises(BudgetExceeded):
            find_shell(5, 32, budget=1_000_000)


class TestLemmaSuite:
    def test_witness_has_unique_representation(self):
        # seeded sweep mirroring the acceptance run at smaller volume
        rng = Random(59)
        for _ in range(60):
            C = random_shell_subset(rng)
            tset = set()
            while len(tset) < rng.randint(1, 12):
                tset.add(tuple(rng.randint(-5, 5) for _ in range(C.d)))
            T = PointSet(C.d, tuple(tset))
            counts = oracle_representation_counts(C.points, T.points)
            for y in C.points:
                x, t = lonely_witness_for(y, C, T)
                assert counts[x] == 1
                assert tuple(a + b for a, b in zip(y, t)) == x
