from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from rankbarrier import linalg
from rankbarrier.field import MIN_PRIME, QQ, FieldError, PrimeField, field_from_spec, require_randomized_safety

F = PrimeField(MIN_PRIME)


def test_rationals_stay_exact():
    assert QQ.div(1, 3) == Fraction(1, 3)
    assert QQ(Fraction(6, 3)) == 2 and isinstance(QQ(Fraction(6, 3)), int)
    assert QQ.parse("-4/6") == Fraction(-2, 3)
    assert QQ.parse("7") == 7


def test_bad_coefficients_refused():
    for bad in ("1/0", "abc", True, 1.5):
        with pytest.raises(FieldError):
            QQ.parse(bad)


def test_prime_field_floor_and_primality():
    with pytest.raises(FieldError):
        PrimeField(101)
    with pytest.raises(FieldError):
        PrimeField(MIN_PRIME + 2)  # 2^31 + 1 = 3 * 715827883
    assert PrimeField(2**61 - 1).characteristic == 2**61 - 1


def test_prime_field_inverse():
    a = F(123456)
    assert a * F.div(1, a) == 1
    assert F(Fraction(1, 2)) * 2 == 1
    assert F(-1) == MIN_PRIME - 1


def test_field_specs():
    assert field_from_spec("rational") is QQ
    assert field_from_spec("prime:2147483647") == F
    assert field_from_spec("prime(2147483647)") == F
    with pytest.raises(FieldError):
        field_from_spec("reals")


def test_randomized_safety_floor():
    require_randomized_safety(QQ, 10**6, 10**6)
    require_randomized_safety(F, 3, 20)
    with pytest.raises(FieldError):
        require_randomized_safety(F, 10**4, 10**4)


def test_sample_range_cannot_exceed_prime():
    with pytest.raises(FieldError):
        F.check_sample_range(MIN_PRIME + 1)


matrices = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda k: st.lists(st.lists(st.integers(-3, 3), min_size=k, max_size=k), min_size=m, max_size=m)))


@given(matrices)
def test_rank_matches_sympy(A):
    assert linalg.rank(A) == sympy.Matrix(A).rank()


@given(matrices)
def test_rank_mod_p_matches_rationals_for_small_entries(A):
    # entries are tiny, so no minor can vanish mod a 31-bit prime unless it vanishes over QQ
    assert linalg.rank(A, F) == linalg.rank(A)


def test_rank_with_fractions():
    assert linalg.rank([[Fraction(1, 2), Fraction(1, 3)], [3, 2]]) == 1


def test_echelon_membership():
    ech = linalg.Echelon(3)
    assert ech.add([1, 2, 3])
    assert not ech.add([2, 4, 6])
    assert ech.contains([-1, -2, -3])
    assert not ech.contains([0, 0, 1])
    assert ech.rank == 1


def test_span_rank_of_random_vectors():
    rng = random.Random(3)
    vecs = [[rng.randint(-9, 9) for _ in range(6)] for _ in range(4)]
    assert linalg.span_rank(vecs + [[a + b for a, b in zip(vecs[0], vecs[1])]]) == 4


def test_shape_errors():
    with pytest.raises(linalg.DimensionError):
        linalg.as_matrix([[1, 2], [3]])
    with pytest.raises(linalg.DimensionError):
        linalg.mat_add([[1]], [[1, 2]])
