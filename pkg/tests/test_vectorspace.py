"""Exact vector arithmetic, the balancing predicate, and serialization."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

from selbal.errors import ContractViolation
from selbal.sampling import random_family, random_unit_vector
from selbal.vectorspace import (ScaledVector, SignVector, UnitVectorFamily,
                                combine, coordinate_index, coordinate_point,
                                family_from_dict, family_to_dict,
                                is_balancing_witness, norm_sq_scaled)

from conftest import oracle_combination_values, oracle_norm_sq


def basis_family(n: int, indices) -> UnitVectorFamily:
    return UnitVectorFamily(
        tuple(ScaledVector(n, 2, 0, {i: 1}) for i in indices))


class TestScaledVector:
    def test_canonical_form_drops_zeros(self):
        v = ScaledVector(4, 2, 1, {0: 1, 2: 0, 3: -1})
        assert v.pairs() == ((0, 1), (3, -1))

    def test_rejects_out_of_range_index(self):
        with pytest.raises(ContractViolation):
            ScaledVector(3, 2, 1, {3: 1})

    def test_rescaling_is_exact_and_lossless(self):
        v = ScaledVector(3, 2, 1, {0: 1, 2: -1})
        w = v.rescaled(3)
        assert w.pairs() == ((0, 4), (2, -4))
        assert v.value(0) == w.value(0) == Fraction(1, 2)

    def test_addition_aligns_scales(self):
        v = ScaledVector(3, 2, 1, {0: 1})
        w = ScaledVector(3, 2, 2, {0: 1, 1: 2})
        s = v + w
        assert s.k == 2
        assert s.pairs() == ((0, 3), (1, 2))

    def test_mixed_spaces_rejected(self):
        v = ScaledVector(3, 2, 1, {0: 1})
        w = ScaledVector(3, 5, 1, {0: 1})
        with pytest.raises(ContractViolation):
            v + w


class TestNormSq:
    def test_zero_vector(self):
        assert norm_sq_scaled(ScaledVector.zero(7, 2, 1)) == 0

    def test_unit_vectors_have_scale_sq(self, flagship_l4):
        for v in flagship_l4.vectors:
            assert norm_sq_scaled(v) == flagship_l4.scale_sq

    def test_generated_level_vectors(self, instance_l5):
        # p^2i entries of numerator p^(k-i) at scale p^k sum to p^2k
        for v in instance_l5.vectors:
            assert norm_sq_scaled(v) == 4


class TestCoordinateIndex:
    def test_origin(self):
        assert coordinate_index((1, 1, 1), 6) == 0

    def test_worked_case(self):
        assert coordinate_index((3, 2), 5) == 7

    def test_endpoint_1d(self):
        assert coordinate_index((9,), 9) == 8

    def test_out_of_range(self):
        with pytest.raises(ContractViolation):
            coordinate_index((0, 1), 5)

    def test_round_trip_bijection(self):
        rng = Random(5)
        for _ in range(200):
            d = rng.randint(1, 4)
            L = rng.randint(1, 6)
            x = tuple(rng.randint(1, L) for _ in range(d))
            assert coordinate_point(coordinate_index(x, L), L, d) == x


class TestCombine:
    def test_all_zero_gives_zero_vector(self, flagship_l4):
        v = combine(flagship_l4, SignVector.zeros(flagship_l4.m))
        assert v.pairs() == ()

    def test_single_plus_one_is_identity(self, flagship_l4):
        for i in range(flagship_l4.m):
            eps = [0] * flagship_l4.m
            eps[i] = 1
            assert combine(flagship_l4, eps).entries == \
                flagship_l4.vectors[i].entries

    def test_figure_type2_minus_its_neighbors(self):
        # one half-neighbor-sum vector minus the four basis vectors at its
        # support leaves |v_x| = 1/2 in exactly four coordinates
        from selbal.construction import figure_example
        fam = figure_example()
        eps = [0] * 34
        eps[25] = 1  # first interior vector, at t = (2, 2)
        support = sorted(fam.vectors[25].entries)
        for idx in support:
            eps[idx] = -1  # basis vector for coordinate idx is vector idx
        values = oracle_combination_values(fam, eps)
        assert sorted(values) == support
        assert all(abs(v) == Fraction(1, 2) for v in values.values())
        got = combine(fam, eps)
        assert {i: Fraction(a, 2) for i, a in got.entries.items()} == values

    def test_length_mismatch(self, flagship_l4):
        with pytest.raises(ContractViolation):
            combine(flagship_l4, [0, 1])

    def test_linearity_on_disjoint_sign_patterns(self):
        rng = Random(11)
        for _ in range(50):
            fam = random_family(rng, rng.randint(2, 8), rng.randint(3, 9))
            eps1, eps2 = [], []
            for _i in range(fam.m):
                a, b = rng.choice([(0, 0), (0, 1), (1, 0), (-1, 0), (0, -1),
                                   (1, -1), (-1, 1)])
                eps1.append(a)
                eps2.append(b)
            merged = [a + b for a, b in zip(eps1, eps2)]
            assert (combine(fam, eps1) + combine(fam, eps2)).entries == \
                combine(fam, merged).entries


class TestBalancingWitness:
    def test_trivial_is_never_a_witness(self, flagship_l4):
        assert not is_balancing_witness(flagship_l4,
                                        SignVector.zeros(flagship_l4.m))

    def test_single_vector_norm_is_exactly_one(self, flagship_l4):
        # the inequality is strict, so a lone vector never balances
        eps = [0] * flagship_l4.m
        eps[3] = 1
        assert not is_balancing_witness(flagship_l4, eps)

    def test_duplicate_cancellation(self):
        fam = basis_family(2, [0, 0])
        assert is_balancing_witness(fam, (1, -1))

    def test_sign_symmetry_seeded(self):
        rng = Random(17)
        for _ in range(100):
            fam = random_family(rng, rng.randint(1, 8), rng.randint(2, 8))
            eps = SignVector(tuple(rng.choice((-1, 0, 1))
                                   for _ in range(fam.m)))
            assert is_balancing_witness(fam, eps) == \
                is_balancing_witness(fam, -eps)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_exact_norm_matches_fraction_oracle(data):
    rng = Random(data.draw(st.integers(0, 10 ** 6)))
    fam = random_family(rng, rng.randint(1, 10), rng.randint(2, 10),
                        p=rng.choice([2, 3, 5]), k=rng.randint(0, 2))
    eps = tuple(rng.choice((-1, 0, 1)) for _ in range(fam.m))
    exact = norm_sq_scaled(combine(fam, eps))
    assert Fraction(exact, fam.scale_sq) == oracle_norm_sq(fam, eps)


def test_exact_norm_matches_float_within_1e9():
    rng = Random(23)
    for _ in range(200):
        fam = random_family(rng, rng.randint(1, 20), rng.randint(2, 16),
                            p=rng.choice([2, 5]), k=rng.randint(1, 2))
        eps = tuple(rng.choice((-1, 0, 1)) for _ in range(fam.m))
        exact = norm_sq_scaled(combine(fam, eps))
        scale = fam.p ** fam.k
        acc = [0.0] * fam.n
        for c, v in zip(eps, fam.vectors):
            for i, a in v.entries.items():
                acc[i] += c * a / scale
        float_scaled = sum(x * x for x in acc) * fam.scale_sq
        assert math.isclose(exact, float_scaled, rel_tol=1e-9, abs_tol=1e-9)


class TestFamilyInvariants:
    def test_rejects_non_unit_vector(self):
        with pytest.raises(ContractViolation):
            UnitVectorFamily((ScaledVector(2, 2, 1, {0: 1}),))

    def test_rejects_empty(self):
        with pytest.raises(ContractViolation):
            UnitVectorFamily(())

    def test_common_scale_after_normalization(self):
        v1 = ScaledVector(2, 5, 0, {0: 1})
        v2 = ScaledVector(2, 5, 1, {0: 3, 1: 4})
        fam = UnitVectorFamily((v1, v2))
        assert fam.k == 1
        assert fam.vectors[0].pairs() == ((0, 5),)


class TestSerialization:
    def test_instance_round_trip_identical(self, instance_l5):
        doc = family_to_dict(instance_l5)
        back = family_from_dict(json.loads(json.dumps(doc)))
        assert back.n == instance_l5.n and back.m == instance_l5.m
        assert back.p == instance_l5.p and back.k == instance_l5.k
        for a, b in zip(back.vectors, instance_l5.vectors):
            assert a.pairs() == b.pairs()
        assert back.provenance == instance_l5.provenance

    def test_random_family_round_trip(self):
        rng = Random(31)
        for _ in range(25):
            fam = random_family(rng, rng.randint(1, 6), rng.randint(2, 9),
                                p=rng.choice([2, 3, 5]), k=rng.randint(0, 2))
            back = family_from_dict(family_to_dict(fam))
            assert [v.pairs() for v in back.vectors] == \
                [v.pairs() for v in fam.vectors]

    def test_missing_field_named(self):
        doc = family_to_dict(basis_family(2, [0]))
        del doc["vectors"]
        with pytest.raises(ContractViolation, match="vectors"):
            family_from_dict(doc)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_random_unit_vectors_are_exactly_unit(seed):
    rng = Random(seed)
    n = rng.randint(1, 12)
    p = rng.choice([2, 3, 5])
    k = rng.randint(0, 2)
    v = random_unit_vector(rng, n, p, k)
    assert norm_sq_scaled(v) == p ** (2 * k)
