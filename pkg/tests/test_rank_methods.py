from __future__ import annotations

import random
from fractions import Fraction

import pytest

from rankbarrier import linalg
from rankbarrier.barrier_lab import random_linear_map, random_simple_element
from rankbarrier.poly import DIVIDED, STANDARD, Polynomial, monomials_up_to
from rankbarrier.polymatrix import exact_symbolic_rank
from rankbarrier.rank_methods import (
    TENSOR,
    WARING,
    LinearMap,
    RankMethodError,
    Tensor,
    apply_map,
    barrier_bound,
    basis_indices,
    catalecticant,
    catalecticant_map,
    lower_bound,
    mode_flattening,
    mode_flattening_map,
    reference_values,
    symbolic_image,
)


def affine_power(coefs, d):
    n = len(coefs) - 1
    ell = Polynomial(n, {(0,) * n: coefs[0], **{tuple(int(i == j) for i in range(n)): coefs[j + 1] for j in range(n)}})
    return ell**d


# ----- linear maps -----------------------------------------------------------

def test_apply_map_linearity_examples():
    A, B = [[1, 2], [3, 4]], [[0, 1], [1, 0]]
    L = LinearMap(WARING, 2, 2, 2, {(1, 0): A, (0, 1): B})
    assert linalg.is_zero_matrix(apply_map(L, Polynomial.zero(2)))
    assert apply_map(L, Polynomial.monomial((1, 0), basis=DIVIDED)) == linalg.as_matrix(A)
    f = Polynomial(2, {(1, 0): 2, (0, 1): 1}, DIVIDED)
    assert apply_map(L, f) == linalg.mat_add(linalg.mat_scale(2, A), B)


def test_apply_map_reads_divided_coefficients():
    L = LinearMap(WARING, 1, 2, 1, {(2,): [[1]]})
    # x^2 in the standard basis is 2 x^(2) in the divided basis
    assert apply_map(L, Polynomial(1, {(2,): 1})) == ((2,),)


def test_map_validation():
    with pytest.raises(RankMethodError):
        LinearMap(WARING, 2, 2, 2, {(3, 0): [[1, 0], [0, 1]]})
    with pytest.raises(RankMethodError):
        LinearMap(WARING, 2, 2, 2, {(1, 0): [[1]]})
    with pytest.raises(RankMethodError):
        LinearMap(TENSOR, 2, 2, 1, {(0, 2): [[1]]})
    L = LinearMap(WARING, 1, 1, 1)
    with pytest.raises(RankMethodError):
        apply_map(L, Polynomial(1, {(2,): 1}))


def test_basis_counts():
    assert len(basis_indices(WARING, 2, 2)) == 6
    assert len(basis_indices(TENSOR, 3, 2)) == 9


# ----- symbolic images ----------------------------------------------------------

def test_waring_symbolic_image_one_variable():
    c0, c1, c2 = 3, 5, 7
    L = LinearMap(WARING, 1, 2, 1, {(0,): [[c0]], (1,): [[c1]], (2,): [[c2]]})
    M = symbolic_image(L)
    # (y0 + y1 x)^2 = y0^2 + 2 y0 y1 x + 2 y1^2 x^(2) in the divided basis of x
    expected = Polynomial(2, {(2, 0): c0, (1, 1): 2 * c1, (0, 2): 2 * c2})
    assert M[0, 0] == expected


def test_waring_symbolic_image_matches_evaluation():
    rng = random.Random(1)
    for _ in range(20):
        n, d, m = rng.randint(1, 3), rng.randint(1, 4), rng.randint(1, 3)
        L = random_linear_map(WARING, n, d, m, density=0.6, seed=rng.random())
        M = symbolic_image(L)
        assert M.is_homogeneous(d)
        a = [rng.randint(-4, 4) for _ in range(n + 1)]
        assert M.evaluate(a) == apply_map(L, affine_power(a, d))


def test_tensor_symbolic_image_matches_evaluation():
    rng = random.Random(2)
    for _ in range(20):
        n, d, m = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
        L = random_linear_map(TENSOR, n, d, m, density=0.6, seed=rng.random())
        M = symbolic_image(L)
        assert M.is_set_multilinear(Tensor(n, d).partition())
        vecs = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(d)]
        point = [x for v in vecs for x in v]
        assert M.evaluate(point) == apply_map(L, Tensor.rank_one(vecs))


def test_tensor_symbolic_image_of_single_image():
    n, d = 2, 3
    L = LinearMap(TENSOR, n, d, 2, {(0, 0, 0): [[1, 0], [0, 1]]})
    M = symbolic_image(L)
    mono = Polynomial(n * d, {(1, 0, 1, 0, 1, 0): 1})
    assert M[0, 0] == mono and M[1, 1] == mono and M[0, 1].is_zero()


def test_zero_map_images():
    assert symbolic_image(LinearMap(WARING, 2, 2, 3)).is_zero()
    assert symbolic_image(LinearMap(TENSOR, 2, 2, 3)).is_zero()


# ----- flattenings -------------------------------------------------------------

def test_catalecticant_of_power_has_rank_one():
    rng = random.Random(4)
    for _ in range(100):
        n = rng.randint(1, 4)
        d = rng.randint(1, 4)
        k = rng.randint(1, d)
        coefs = [0] + [rng.randint(-5, 5) for _ in range(n)]
        if not any(coefs):
            coefs[1] = 1
        assert linalg.rank(catalecticant(affine_power(coefs, d), k)) == 1


def test_catalecticant_examples():
    assert linalg.is_zero_matrix(catalecticant(Polynomial.zero(2), 1, d=2))
    assert linalg.rank(catalecticant(Polynomial(3, {(1, 1, 1): 1}), 1)) == 3


def test_catalecticant_rejects_inhomogeneous():
    with pytest.raises(RankMethodError):
        catalecticant(Polynomial(2, {(1, 0): 1, (2, 0): 1}), 1)


def test_catalecticant_map_agrees_with_catalecticant():
    rng = random.Random(5)
    f = Polynomial(3, {e: rng.randint(-3, 3) for e in monomials_up_to(3, 3) if sum(e) == 3})
    A = apply_map(catalecticant_map(3, 3, 1), f)
    assert linalg.rank(A) == linalg.rank(catalecticant(f, 1))


def test_mode_flattening_examples():
    rng = random.Random(6)
    T = Tensor.rank_one([[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)])
    for S in ({0}, {1}, {0, 2}):
        assert linalg.rank(mode_flattening(T, S)) <= 1
    D = Tensor.diagonal(3, 3)
    assert linalg.rank(mode_flattening(D, {0})) == 3
    assert linalg.rank(mode_flattening(Tensor(3, 3), {0})) == 0


def test_mode_flattening_is_subadditive_on_rank_one_sums():
    rng = random.Random(7)
    for _ in range(30):
        n, d, k = rng.randint(2, 3), rng.randint(2, 4), rng.randint(1, 4)
        T = Tensor(n, d)
        for _ in range(k):
            T = T + Tensor.rank_one([[rng.randint(-3, 3) for _ in range(n)] for _ in range(d)])
        S = rng.sample(range(d), rng.randint(1, d - 1))
        assert linalg.rank(mode_flattening(T, S)) <= k


def test_mode_flattening_rejects_trivial_subsets():
    with pytest.raises(RankMethodError):
        mode_flattening(Tensor.diagonal(2, 2), set())
    with pytest.raises(RankMethodError):
        mode_flattening(Tensor.diagonal(2, 2), {0, 1})


def test_tensor_polynomial_round_trip():
    T = Tensor(2, 3, {(0, 1, 1): 3, (1, 0, 0): -2})
    assert Tensor.from_polynomial(T.to_polynomial(), 2, 3) == T


# ----- bounds -------------------------------------------------------------------

def test_barrier_values():
    for n in range(2, 11):
        assert barrier_bound(TENSOR, n, 3) == 8 * n
    assert barrier_bound(WARING, 3, 3) == 16
    assert barrier_bound(TENSOR, 2, 2) == 8
    assert barrier_bound(TENSOR, 4, 4) == 256


def test_reference_values():
    assert reference_values(3, 3).ah95_generic_waring == 4
    assert reference_values(4, 4).gl17_waring_intro == 11
    assert reference_values(4, 2).aft11_tensor == 8
    assert reference_values(3, 3).random_tensor_rank == Fraction(3)
    r = reference_values(3, 2)
    assert isinstance(r.aft11_tensor, float) and r.aft11_tensor_rounded == round(r.aft11_tensor)


def test_lower_bound_examples():
    L = catalecticant_map(3, 3, 1)
    res = lower_bound(L, Polynomial(3, {(1, 1, 1): 1}), 1)
    assert res.bound == 3 and res.barrier == 16
    res = lower_bound(L, affine_power([0, 1, 2, -1], 3), 1)
    assert res.bound == 1
    res = lower_bound(mode_flattening_map(3, 3, {0}), Tensor.diagonal(3, 3), 1)
    assert res.bound == 3 and res.barrier == 24


def test_lower_bound_guards():
    L = catalecticant_map(2, 2, 1)
    with pytest.raises(RankMethodError):
        lower_bound(L, Polynomial(2, {(1, 1): 1}), 0)


def test_catalecticant_map_has_rank_one_on_simple_set():
    L = catalecticant_map(3, 3, 1)
    assert exact_symbolic_rank(symbolic_image(L)) == 1
    rng = random.Random(0)
    for _ in range(10):
        assert linalg.rank(apply_map(L, random_simple_element(L, rng))) <= 1
