from __future__ import annotations

import itertools
import random

import pytest

from conftest import low_rank_polymatrix, random_polynomial
from rankbarrier.decomposition import (
    DecompositionError,
    HomDecomposition,
    HomTerm,
    find_shift_point,
    hom_rank_decompose,
    sm_rank_decompose,
    symbolic_decompose,
    verify_decomposition,
)
from rankbarrier.poly import Polynomial, VariablePartition
from rankbarrier.polymatrix import PolyMatrix, exact_symbolic_rank


def xs(n):
    return [Polynomial.var(n, i) for i in range(n)]


def h_product(f, g, d):
    return PolyMatrix([[(a * b).homogeneous_component(d) for b in g] for a in f])


# ----- shift point ------------------------------------------------------------

def test_shift_point_examples():
    x1, x2 = xs(2)
    assert find_shift_point([x1]) == (1, 0)
    assert find_shift_point([Polynomial.constant(2, 1)]) == (0, 0)
    one = Polynomial.constant(2, 1)
    assert find_shift_point([x1 - one, x2 - one.scale(2)]) == (0, 0)


def test_shift_point_avoids_every_denominator():
    x1, x2, x3 = xs(3)
    denoms = [x1 * x2 - x3, x1 + x2 + x3, x1 * x1 - x2 * x3 + Polynomial.constant(3, 1)]
    a = find_shift_point(denoms)
    assert all(p.evaluate(a) != 0 for p in denoms)


# ----- symbolic decomposition -----------------------------------------------------

def test_symbolic_rank_one():
    x1, x2 = xs(2)
    M = PolyMatrix.outer([x1, x2], [x1, x2])
    dec = symbolic_decompose(M, 2)
    assert len(dec) == 1
    f, g = dec.pairs[0]
    assert h_product(f, g, 2) == M


def test_symbolic_zero_matrix():
    assert len(symbolic_decompose(PolyMatrix.zeros(2, 2, 2), 3)) == 0


def test_symbolic_diagonal():
    x1, x2 = xs(2)
    z = Polynomial.zero(2)
    M = PolyMatrix([[x1 * x2, z], [z, x1 * x2]])
    dec = symbolic_decompose(M, 2)
    assert len(dec) == 2
    total = PolyMatrix.zeros(2, 2, 2)
    for f, g in dec:
        total = total + h_product(f, g, 2)
    assert total == M


def test_symbolic_requires_homogeneous_input():
    x1, x2 = xs(2)
    with pytest.raises(DecompositionError):
        symbolic_decompose(PolyMatrix([[x1 + x1 * x2]]), 2)


def test_symbolic_pairs_have_degree_at_most_d():
    rng = random.Random(8)
    for _ in range(10):
        M = low_rank_polymatrix(rng, 3, 3, 2, 2, 1, 2)
        dec = symbolic_decompose(M, 3)
        assert len(dec) == exact_symbolic_rank(M)
        for f, g in dec:
            assert all(p.degree <= 3 for p in f + g)


# ----- hom-rank ---------------------------------------------------------------------

def test_hom_zero_matrix():
    assert len(hom_rank_decompose(PolyMatrix.zeros(2, 2, 2), 2)) == 0


def test_hom_rank_one():
    x1, x2 = xs(2)
    M = PolyMatrix.outer([x1, x2], [x1, x2])
    dec = hom_rank_decompose(M, 2)
    assert len(dec) <= 3
    assert verify_decomposition(M, dec)


def test_hom_diagonal_term_degrees():
    x1, x2 = xs(2)
    z = Polynomial.zero(2)
    M = PolyMatrix([[x1 * x2, z], [z, x1 * x2]])
    dec = hom_rank_decompose(M, 2)
    assert len(dec) <= 6
    assert {(t.deg_u, t.deg_v) for t in dec.terms} <= {(0, 2), (1, 1), (2, 0)}
    assert verify_decomposition(M, dec)


def test_hom_random_round_trips():
    rng = random.Random(21)
    for _ in range(15):
        n, m, k = rng.randint(1, 3), rng.randint(1, 4), rng.randint(1, 4)
        du, dv = rng.randint(0, 2), rng.randint(0, 2)
        M = low_rank_polymatrix(rng, m, k, n, rng.randint(1, 2), du, dv)
        dec = hom_rank_decompose(M, du + dv)
        assert len(dec) <= dec.bound
        assert dec.symbolic_rank == exact_symbolic_rank(M)
        assert verify_decomposition(M, dec)


def test_hom_full_rank_matrix():
    rng = random.Random(3)
    entries = [[random_polynomial(rng, 2, 3, 3, homogeneous=3) for _ in range(3)] for _ in range(3)]
    M = PolyMatrix(entries)
    dec = hom_rank_decompose(M, 3)
    assert len(dec) <= 4 * exact_symbolic_rank(M)
    assert verify_decomposition(M, dec)


# ----- sm-rank ---------------------------------------------------------------------

def block_vars(part, n):
    return [[Polynomial.var(part.num_vars, b[i]) for i in range(n)] for b in part.blocks]


def test_sm_zero_matrix():
    part = VariablePartition.uniform(2, 2)
    assert len(sm_rank_decompose(PolyMatrix.zeros(2, 2, 4), part)) == 0


def test_sm_rank_one_product():
    part = VariablePartition.uniform(2, 2)
    y = block_vars(part, 2)
    u = [y[0][0] + y[0][1], y[0][1]]
    v = [y[1][0], y[1][0] - y[1][1]]
    M = PolyMatrix.outer(u, v)
    dec = sm_rank_decompose(M, part)
    assert len(dec) <= 4
    assert verify_decomposition(M, dec)


def test_sm_two_by_two_rank_two():
    part = VariablePartition.uniform(2, 2)
    y = block_vars(part, 2)
    M = PolyMatrix([[y[0][0] * y[1][0], y[0][1] * y[1][1]],
                    [y[0][0] * y[1][1] + y[0][1] * y[1][0], y[0][0] * y[1][0]]])
    assert exact_symbolic_rank(M) == 2
    dec = sm_rank_decompose(M, part)
    assert len(dec) <= 8
    assert verify_decomposition(M, dec)
    for t in dec.terms:
        assert t.S <= {0, 1}
        assert all(p.is_set_multilinear(part, t.S) for p in t.u)


def test_sm_rejects_non_multilinear():
    part = VariablePartition.uniform(2, 2)
    y = block_vars(part, 2)
    with pytest.raises(DecompositionError):
        sm_rank_decompose(PolyMatrix([[y[0][0] * y[0][1]]]), part)


def random_sm_entry(rng, part, n):
    d = part.d
    terms = {}
    for choice in itertools.product(range(n), repeat=d):
        if rng.random() < 0.5:
            e = [0] * part.num_vars
            for j, i in enumerate(choice):
                e[part.blocks[j][i]] = 1
            terms[tuple(e)] = rng.randint(-3, 3)
    return Polynomial(part.num_vars, terms)


def test_sm_random_round_trips():
    rng = random.Random(13)
    for _ in range(10):
        d, n = rng.randint(1, 3), rng.randint(1, 2)
        part = VariablePartition.uniform(d, n)
        m = rng.randint(1, 3)
        M = PolyMatrix([[random_sm_entry(rng, part, n) for _ in range(m)] for _ in range(m)], part.num_vars)
        dec = sm_rank_decompose(M, part)
        assert len(dec) <= dec.bound
        assert verify_decomposition(M, dec)


# ----- verification ---------------------------------------------------------------

def test_tampered_decomposition_fails():
    x1, x2 = xs(2)
    M = PolyMatrix.outer([x1, x2], [x1, x2])
    dec = hom_rank_decompose(M, 2)
    t = dec.terms[0]
    i = next(k for k, p in enumerate(t.u) if not p.is_zero())
    bad_u = t.u[:i] + (t.u[i].scale(2),) + t.u[i + 1:]
    bad = HomDecomposition((HomTerm(bad_u, t.v, t.deg_u, t.deg_v),) + dec.terms[1:], dec.degree,
                           dec.symbolic_rank, dec.shape)
    assert not verify_decomposition(M, bad)


def test_hand_built_rank_one_decomposition():
    x1, x2 = xs(2)
    M = PolyMatrix.outer([x1, x2], [x1 + x2])
    assert verify_decomposition(M, [([x1, x2], [x1 + x2])])
    assert not verify_decomposition(M, [([x1, x2], [x1])])


def test_wrong_degree_split_fails():
    x1, x2 = xs(2)
    M = PolyMatrix.outer([x1], [x2])
    bad = HomDecomposition((HomTerm((x1,), (x2,), 2, 0),), 2, 1, (1, 1))
    assert not verify_decomposition(M, bad)
