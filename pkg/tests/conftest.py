from __future__ import annotations

import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rankbarrier.field import QQ
from rankbarrier.poly import STANDARD, Polynomial, monomials_of_degree, monomials_up_to
from rankbarrier.polymatrix import PolyMatrix

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

small_ints = st.integers(min_value=-5, max_value=5)


@st.composite
def polynomials(draw, nvars: int = 2, max_degree: int = 3, max_terms: int = 5, basis: str = STANDARD):
    mons = monomials_up_to(nvars, max_degree)
    chosen = draw(st.lists(st.sampled_from(mons), max_size=max_terms, unique=True))
    terms = {e: draw(small_ints) for e in chosen}
    return Polynomial(nvars, terms, basis, QQ)


@st.composite
def poly_pairs(draw, max_degree: int = 3):
    n = draw(st.integers(1, 3))
    return draw(polynomials(n, max_degree)), draw(polynomials(n, max_degree)), n


@st.composite
def points(draw, n: int):
    return [draw(small_ints) for _ in range(n)]


def random_polynomial(rng: random.Random, n: int, max_degree: int, terms: int,
                      homogeneous: int | None = None, coef: int = 5) -> Polynomial:
    mons = monomials_of_degree(n, homogeneous) if homogeneous is not None else monomials_up_to(n, max_degree)
    picks = rng.sample(mons, min(terms, len(mons)))
    return Polynomial(n, {e: rng.randint(-coef, coef) for e in picks}, STANDARD, QQ)


def random_polymatrix(rng: random.Random, rows: int, cols: int, n: int, max_degree: int,
                      terms: int = 3, homogeneous: int | None = None, zero_prob: float = 0.2) -> PolyMatrix:
    entries = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            if rng.random() < zero_prob:
                row.append(Polynomial.zero(n))
            else:
                row.append(random_polynomial(rng, n, max_degree, terms, homogeneous))
        entries.append(row)
    return PolyMatrix(entries, n, STANDARD, QQ)


def low_rank_polymatrix(rng: random.Random, rows: int, cols: int, n: int, rank: int,
                        deg_u: int, deg_v: int, terms: int = 2) -> PolyMatrix:
    """Sum of ``rank`` outer products of homogeneous vectors, so entries are homogeneous of ``deg_u + deg_v``."""
    total = PolyMatrix.zeros(rows, cols, n)
    for _ in range(rank):
        u = [random_polynomial(rng, n, deg_u, terms, deg_u) for _ in range(rows)]
        v = [random_polynomial(rng, n, deg_v, terms, deg_v) for _ in range(cols)]
        total = total + PolyMatrix.outer(u, v)
    return total


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])
