from __future__ import annotations

import itertools
import random

import pytest

from rankbarrier.depth3 import (
    Depth3Error,
    build_psi,
    expected_dim,
    generic_forms,
    is_ssm,
    polarization_dim,
    polarize,
    sym_poly,
    validate_rank_method,
    y_partition,
)
from rankbarrier.poly import Polynomial, VariablePartition, monomials_of_degree
from rankbarrier.polymatrix import PolyMatrix


def brute_sym(d, forms):
    total = forms[0].zero_like()
    for T in itertools.combinations(forms, d):
        prod = forms[0].const_like(1)
        for f in T:
            prod = prod * f
        total = total + prod
    return total


def random_forms(rng, nvars, D, with_constants=False):
    forms = []
    for _ in range(D):
        terms = {tuple(int(i == j) for i in range(nvars)): rng.randint(-3, 3) for j in range(nvars)}
        if with_constants:
            terms[(0,) * nvars] = rng.randint(-3, 3)
        forms.append(Polynomial(nvars, terms))
    return forms


# ----- symmetric polynomials ------------------------------------------------------

def test_sym_examples():
    y = [Polynomial.var(4, i) for i in range(4)]  # y1, y2, y3, x
    x = y[3]
    forms = [y[0] * x, y[1] * x, y[2] * x]
    assert sym_poly(0, forms) == Polynomial.constant(4, 1)
    assert sym_poly(4, forms).is_zero()
    assert sym_poly(2, forms) == (y[0] * y[1] + y[0] * y[2] + y[1] * y[2]) * x * x


def test_sym_matches_subset_sum_and_top_component():
    rng = random.Random(0)
    for _ in range(50):
        nvars, D = rng.randint(1, 3), rng.randint(1, 5)
        d = rng.randint(0, D)
        forms = random_forms(rng, nvars, D)
        s = sym_poly(d, forms)
        assert s == brute_sym(d, forms)
        prod = forms[0].const_like(1)
        for f in forms:
            prod = prod * (f + f.const_like(1))
        assert s == prod.homogeneous_component(d)


# ----- psi ---------------------------------------------------------------------------

def test_psi_single_variable_is_elementary_symmetric():
    for D in range(1, 5):
        for d in range(1, D + 1):
            P = build_psi(1, D, d)
            ys = [Polynomial.var(D, i) for i in range(D)]
            assert list(P.coords) == [(d,)]
            assert P.coords[(d,)] == brute_sym(d, ys)


def test_psi_two_by_two():
    P = build_psi(2, 2, 2)
    y11, y12, y21, y22 = (Polynomial.var(4, i) for i in range(4))
    assert P.coords[(1, 1)] == y11 * y22 + y12 * y21
    assert P.coords[(2, 0)] == y11 * y21


def test_psi_refuses_short_products():
    with pytest.raises(Depth3Error):
        build_psi(2, 1, 2)


def test_psi_invariant_under_all_row_permutations():
    for n in (1, 2, 3):
        for D in (1, 2, 3, 4):
            for d in range(1, min(D, 3) + 1):
                P = build_psi(n, D, d)
                for perm in itertools.permutations(range(D)):
                    mapping = [perm[v // n] * n + v % n for v in range(D * n)]
                    for p in P.coords.values():
                        assert p.rename(D * n, mapping) == p


def test_psi_recovers_the_product_coefficients():
    # evaluating psi at a numeric y gives the coefficients of Sym_d of numeric forms
    rng = random.Random(1)
    n, D, d = 2, 3, 2
    P = build_psi(n, D, d)
    yv = [rng.randint(-3, 3) for _ in range(D * n)]
    forms = [Polynomial(n, {tuple(int(i == j) for i in range(n)): yv[r * n + j] for j in range(n)}) for r in range(D)]
    target = sym_poly(d, forms)
    for e, p in P.coords.items():
        assert p.evaluate(yv) == target.coeff(e)


# ----- SSM -----------------------------------------------------------------------------

def test_ssm_examples():
    D = 4
    ys = [Polynomial.var(D, i) for i in range(D)]
    singletons = VariablePartition(tuple((i,) for i in range(D)))
    assert is_ssm(brute_sym(2, ys), singletons)
    y11, y12, y21, y22 = (Polynomial.var(4, i) for i in range(4))
    assert not is_ssm(y11 * y22, y_partition(2, 2))
    assert is_ssm(y11 * y22 + y12 * y21, y_partition(2, 2))
    assert not is_ssm(y11 * y11, y_partition(2, 2))
    assert not is_ssm(y11 * y12, y_partition(2, 2))


def test_ssm_requires_equal_blocks():
    with pytest.raises(Depth3Error):
        is_ssm(Polynomial.var(3, 0), VariablePartition(((0,), (1, 2))))


def test_ssm_requires_homogeneity():
    y11, _, y21, _ = (Polynomial.var(4, i) for i in range(4))
    assert not is_ssm(y11 + y21 + y11 * y21, y_partition(2, 2))


# ----- polarization ------------------------------------------------------------------

def test_polarize_examples():
    y11, y12, y21, y22 = (Polynomial.var(4, i) for i in range(4))
    assert polarize((1, 1), 2) == y11 * y22 + y12 * y21
    assert polarize((2, 0), 2) == (y11 * y21).scale(2)


def test_polarize_images_are_ssm_and_refuse_short_D():
    for n in (1, 2, 3):
        for d in (1, 2, 3):
            for D in (d, d + 1):
                for e in monomials_of_degree(n, d):
                    assert is_ssm(polarize(e, D), y_partition(n, D))
    with pytest.raises(Depth3Error):
        polarize((2, 1), 2)


def test_polarization_dimension_and_injectivity():
    for n in (1, 2, 3):
        for d in (1, 2, 3):
            for D in (d, d + 1):
                # full rank on the monomial basis means distinct monomials give independent images
                assert polarization_dim(n, D, d) == expected_dim(n, d) == len(monomials_of_degree(n, d))


def test_psi_coordinates_validate():
    for n in (1, 2, 3):
        for D in (1, 2, 3, 4):
            for d in range(1, min(D, 3) + 1):
                P = build_psi(n, D, d)
                assert validate_rank_method(P.as_matrix(), n, D, d)


def test_validate_rejects_non_ssm_entries():
    y11, y12, y21, y22 = (Polynomial.var(4, i) for i in range(4))
    good = polarize((1, 1), 2)
    assert not validate_rank_method(PolyMatrix([[good, y11 * y11]]), 2, 2, 2)
    assert not validate_rank_method(PolyMatrix([[good, y11 * y12]]), 2, 2, 2)
    assert not validate_rank_method(PolyMatrix([[y11 * y22]]), 2, 2, 2)
    assert validate_rank_method(PolyMatrix([[good.scale(3) - polarize((2, 0), 2), good]]), 2, 2, 2)


def test_generic_forms_layout():
    forms = generic_forms(2, 3)
    assert len(forms) == 3 and all(f.nvars == 8 for f in forms)
    # form 1 is y_10 x_0 + y_11 x_1
    assert set(forms[1].terms) == {(0, 0, 1, 0, 0, 0, 1, 0), (0, 0, 0, 1, 0, 0, 0, 1)}
