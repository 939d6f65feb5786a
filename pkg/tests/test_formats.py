from __future__ import annotations

import random

import pytest
from hypothesis import given

from conftest import low_rank_polymatrix, polynomials
from rankbarrier import formats
from rankbarrier.barrier_lab import random_linear_map
from rankbarrier.decomposition import hom_rank_decompose, sm_rank_decompose, symbolic_decompose, verify_decomposition
from rankbarrier.depth3 import build_psi
from rankbarrier.field import MIN_PRIME, PrimeField
from rankbarrier.poly import DIVIDED, Polynomial, VariablePartition
from rankbarrier.polymatrix import PolyMatrix
from rankbarrier.rank_methods import TENSOR, WARING, Tensor


def round_trip(doc):
    return formats.loads(formats.dumps(doc))


@given(polynomials(nvars=3, max_degree=3, max_terms=6))
def test_polynomial_round_trip(p):
    assert formats.polynomial_from_json(round_trip(formats.polynomial_to_json(p))) == p


def test_fraction_and_divided_coefficients():
    p = Polynomial(2, {(2, 0): "1/2", (0, 1): -3}, DIVIDED)
    doc = formats.polynomial_to_json(p)
    assert doc["basis"] == "divided"
    assert {"exp": [2, 0], "coef": "1/2"} in doc["terms"]
    assert formats.polynomial_from_json(doc) == p


def test_prime_field_round_trip():
    F = PrimeField(MIN_PRIME)
    p = Polynomial(1, {(1,): F(-1)}, field=F)
    doc = formats.polynomial_to_json(p)
    assert doc["terms"][0]["coef"] == str(MIN_PRIME - 1)
    assert formats.polynomial_from_json(doc, F) == p


def test_polymatrix_round_trip():
    M = low_rank_polymatrix(random.Random(0), 3, 2, 2, 2, 1, 1)
    assert formats.polymatrix_from_json(round_trip(formats.polymatrix_to_json(M))) == M


def test_tensor_json_is_one_based():
    T = Tensor(2, 3, {(0, 1, 1): 3})
    doc = formats.tensor_to_json(T)
    assert doc["entries"] == [{"idx": [1, 2, 2], "coef": "3"}]
    assert formats.tensor_from_json(doc) == T


def test_linear_map_round_trip():
    for family in (WARING, TENSOR):
        L = random_linear_map(family, 2, 2, 3, density=0.5, seed=1)
        assert formats.linear_map_from_json(round_trip(formats.linear_map_to_json(L))) == L


def test_linear_map_missing_images_are_zero():
    doc = {"family": "waring", "n": 1, "d": 2, "m": 1, "images": [{"exp": [2], "matrix": [["1"]]}]}
    L = formats.linear_map_from_json(doc)
    assert list(L.images) == [(2,)]


def test_decomposition_documents():
    x1, x2 = (Polynomial.var(2, i) for i in range(2))
    M = PolyMatrix.outer([x1, x2], [x1 + x2, x2])
    for dec in (hom_rank_decompose(M, 2), symbolic_decompose(M, 2)):
        doc = round_trip(formats.decomposition_to_json(dec))
        pairs = formats.decomposition_pairs_from_json(doc)
        if doc["mode"] == "hom":
            assert verify_decomposition(M, pairs)
    part = VariablePartition.uniform(2, 1)
    dec = sm_rank_decompose(PolyMatrix.outer([x1], [x2]), part)
    doc = formats.decomposition_to_json(dec)
    assert all(1 <= j <= 2 for t in doc["terms"] for j in t["S"])


def test_psi_round_trip():
    P = build_psi(2, 3, 2)
    Q = formats.psi_from_json(round_trip(formats.psi_to_json(P)))
    assert Q.coords == P.coords


@pytest.mark.parametrize("text, where", [
    ('{"rows": 1,', "line 1"),
    ('{"rows": 1, "cols": 1, "entries": [[{"vars": 1, "terms": [{"exp": [1], "coef": "x"}]}]]}',
     "$.entries[0][0].terms[0].coef"),
    ('{"rows": 2, "cols": 1, "entries": [[{"vars": 1, "terms": []}]]}', "$.entries"),
    ('{"rows": 1, "cols": 2, "entries": [[{"vars": 1, "terms": []}]]}', "$.entries[0]"),
    ('{"rows": 1, "cols": 1, "entries": [[{"vars": 2, "terms": [{"exp": [1], "coef": "1"}]}]]}',
     "$.entries[0][0].terms[0].exp"),
    ('{"rows": 1, "cols": 1}', "$"),
])
def test_parse_errors_carry_positions(text, where):
    with pytest.raises(formats.FormatError) as info:
        formats.polymatrix_from_json(formats.loads(text))
    assert info.value.where.startswith(where)


def test_tensor_index_errors():
    with pytest.raises(formats.FormatError) as info:
        formats.tensor_from_json({"n": 2, "d": 2, "entries": [{"idx": [1, 3], "coef": "1"}]})
    assert info.value.where == "$.entries[0].idx"


def test_partition_parsing():
    assert formats.parse_partition("1,2;3,4") == [[0, 1], [2, 3]]
    with pytest.raises(formats.FormatError):
        formats.parse_partition("1,a;2")
    with pytest.raises(formats.FormatError):
        formats.parse_partition("1,2;3", nvars=4)


def test_dumps_is_canonical():
    assert formats.dumps({"b": 1, "a": [1, 2]}) == formats.dumps({"a": [1, 2], "b": 1})
