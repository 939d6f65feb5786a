"""Constructive homogeneous and set-multilinear decompositions of polynomial matrices.

Starting from a rank factorization ``M = sum_i p_i (x) q_i / t_i`` over the
function field, the denominators are made invertible as power series by shifting
to a point ``a`` with every ``t_i(a) != 0``. Then

    t_i(x + a) = b_i (1 - that_i(x)),   that_i(0) = 0,

and ``1 / (1 - that_i)`` is replaced by its geometric series truncated at degree
``d``. Only monomials of degree ``<= d`` can reach the degree-``d`` part of the
result, so every intermediate polynomial is truncated at ``d`` as it is formed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from .poly import STANDARD, Polynomial, PolynomialError, PolyVector, VariablePartition
from .polymatrix import PolyMatrix, RankFactorization, exact_symbolic_rank, rank_factorize


class DecompositionError(ValueError):
    """Input violates a decomposition precondition."""


@dataclass(frozen=True)
class HomTerm:
    u: PolyVector
    v: PolyVector
    deg_u: int
    deg_v: int


@dataclass(frozen=True)
class SMTerm:
    u: PolyVector
    v: PolyVector
    S: frozenset[int]


@dataclass(frozen=True)
class HomDecomposition:
    terms: tuple[HomTerm, ...]
    degree: int
    symbolic_rank: int
    shape: tuple[int, int]

    @property
    def bound(self) -> int:
        return self.symbolic_rank * (self.degree + 1)

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SMDecomposition:
    terms: tuple[SMTerm, ...]
    partition: VariablePartition
    symbolic_rank: int
    shape: tuple[int, int]

    @property
    def degree(self) -> int:
        return self.partition.d

    @property
    def bound(self) -> int:
        return self.symbolic_rank * 2**self.partition.d

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SymbolicDecomposition:
    """Pairs ``(f_i, g_i)`` with ``M = sum_i H_d[f_i (x) g_i]``."""

    pairs: tuple[tuple[PolyVector, PolyVector], ...]
    degree: int
    shift_point: tuple
    factorization: RankFactorization | None

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _outer(u: Sequence[Polynomial], v: Sequence[Polynomial]) -> PolyMatrix:
    return PolyMatrix.outer(u, v)


def find_shift_point(denoms: Sequence[Polynomial], grid_limit: int = 1 << 16,
                     scan_budget: int = 100_000, seed: int = 0) -> tuple:
    """A grid point where no denominator vanishes.

    Scans ``{0..g-1}^n`` lexicographically with ``g = deg(prod) + 1``; a nonzero
    polynomial of degree below ``g`` cannot vanish on that whole grid. If the
    scan budget runs out, falls back to seeded uniform sampling on doubled grids.
    """
    if not denoms:
        return ()
    for t in denoms:
        if t.is_zero():
            raise DecompositionError("a denominator is the zero polynomial")
    n = denoms[0].nvars
    g = sum(int(t.degree) for t in denoms) + 1
    if g > grid_limit:
        raise DecompositionError(f"grid size {g} exceeds the limit {grid_limit}")

    def good(a):
        return all(t.evaluate(a) != 0 for t in denoms)

    for count, a in enumerate(itertools.product(range(g), repeat=n)):
        if count >= scan_budget:
            break
        if good(a):
            return a
    rng = random.Random(seed)
    while g <= grid_limit:
        g *= 2
        for _ in range(64):
            a = tuple(rng.randrange(g) for _ in range(n))
            if good(a):
                return a
    raise DecompositionError("no shift point found within the grid limit")


def _check_homogeneous(M: PolyMatrix, d: int) -> None:
    for i, j, p in M.cells():
        if not p.is_homogeneous(d):
            raise DecompositionError(f"entry ({i + 1},{j + 1}) is not homogeneous of degree {d}")


def symbolic_decompose(M: PolyMatrix, d: int, check: bool = __debug__) -> SymbolicDecomposition:
    """``r = rank(M)`` pairs ``(f_i, g_i)`` of polynomial vectors with ``M = sum H_d[f_i (x) g_i]``.

    ``check`` also asserts the truncated-series identity
    ``sum_i H_{<=d}[f_i (x) g_i] = M(x + a)``.
    """
    if d < 0:
        raise DecompositionError("degree must be non-negative")
    _check_homogeneous(M, d)
    basis = M.basis
    Ms = M.to_basis(STANDARD)
    if Ms.is_zero():
        return SymbolicDecomposition((), d, (0,) * M.nvars, None)
    F = rank_factorize(Ms)
    r = F.rank
    if d == 0:
        # constant matrix: t_i are constants, no shift needed
        pairs = []
        for k in range(r):
            inv_t = Ms.field.div(1, F.denominators[k].constant_term())
            f = tuple(p.scale(inv_t) for p in F.column(k))
            pairs.append((f, F.row(k)))
        out = SymbolicDecomposition(tuple(pairs), d, (0,) * M.nvars, F)
        _assert_symbolic(Ms, out)
        return _rebase(out, basis)

    a = find_shift_point(F.denominators)
    field = Ms.field
    one = Polynomial.constant(Ms.nvars, 1, STANDARD, field)
    pairs = []
    for k in range(r):
        t = F.denominators[k]
        b = t.evaluate(a)
        if b == 0:
            raise AssertionError("shift point annihilates a denominator")
        t_shift = t.shift(a, max_degree=d)
        that = one - t_shift.scale(field.div(1, b))
        if that.constant_term() != 0:
            raise AssertionError("shifted denominator has a nonzero constant term after normalization")
        # sum_{j=0}^{d} that^j, truncated at degree d
        series = one
        power = one
        for _ in range(d):
            power = (power * that).truncate(d)
            if power.is_zero():
                break
            series = series + power
        inv_b = field.div(1, b)
        f = tuple(p.shift(a, max_degree=d).scale(inv_b) for p in F.column(k))
        g = tuple((q.shift(a, max_degree=d) * series).truncate(d) for q in F.row(k))
        pairs.append((f, g))
    out = SymbolicDecomposition(tuple(pairs), d, tuple(a), F)
    if check:
        lhs = PolyMatrix.zeros(Ms.rows, Ms.cols, Ms.nvars, STANDARD, field)
        for f, g in pairs:
            lhs = lhs + _outer(f, g).truncate(d)
        if lhs != Ms.shift(a):
            raise AssertionError("truncated series does not reproduce M(x + a) up to degree d")
    _assert_symbolic(Ms, out)
    return _rebase(out, basis)


def _assert_symbolic(M: PolyMatrix, dec: SymbolicDecomposition) -> None:
    total = PolyMatrix.zeros(M.rows, M.cols, M.nvars, M.basis, M.field)
    for f, g in dec.pairs:
        total = total + _outer(f, g).homogeneous_component(dec.degree)
    if total != M:
        raise AssertionError("symbolic decomposition does not reconstruct its input")


def _rebase(dec: SymbolicDecomposition, basis: str) -> SymbolicDecomposition:
    if basis == STANDARD:
        return dec
    pairs = tuple(
        (tuple(p.to_basis(basis) for p in f), tuple(q.to_basis(basis) for q in g)) for f, g in dec.pairs
    )
    return SymbolicDecomposition(pairs, dec.degree, dec.shift_point, dec.factorization)


def hom_rank_decompose(M: PolyMatrix, d: int) -> HomDecomposition:
    """At most ``r (d+1)`` products ``u (x) v`` of homogeneous vectors summing to ``M``."""
    dec = symbolic_decompose(M, d)
    terms = []
    for f, g in dec.pairs:
        for k in range(d + 1):
            u = tuple(p.homogeneous_component(k) for p in f)
            v = tuple(q.homogeneous_component(d - k) for q in g)
            if all(p.is_zero() for p in u) or all(q.is_zero() for q in v):
                continue
            terms.append(HomTerm(u, v, k, d - k))
    r = len(dec.pairs)
    out = HomDecomposition(tuple(terms), d, r, M.shape)
    if len(out) > out.bound:
        raise AssertionError(f"{len(out)} terms exceed the bound {out.bound}")
    verdict = verify_decomposition(M, out)
    if not verdict:
        raise AssertionError(verdict.reason)
    return out


def sm_rank_decompose(M: PolyMatrix, part: VariablePartition) -> SMDecomposition:
    """At most ``r 2^d`` set-multilinear products summing to a set-multilinear ``M``."""
    part.check(M.nvars)
    d = part.d
    for i, j, p in M.cells():
        if not p.is_set_multilinear(part):
            raise DecompositionError(f"entry ({i + 1},{j + 1}) is not set-multilinear of degree {d}")
    dec = symbolic_decompose(M, d)
    full = frozenset(range(d))
    terms = []
    for f, g in dec.pairs:
        for S in part.subsets():
            u = tuple(p.sm_component(part, S) for p in f)
            v = tuple(q.sm_component(part, full - S) for q in g)
            if all(p.is_zero() for p in u) or all(q.is_zero() for q in v):
                continue
            terms.append(SMTerm(u, v, S))
    out = SMDecomposition(tuple(terms), part, len(dec.pairs), M.shape)
    if len(out) > out.bound:
        raise AssertionError(f"{len(out)} terms exceed the bound {out.bound}")
    verdict = verify_decomposition(M, out)
    if not verdict:
        raise AssertionError(verdict.reason)
    return out


def verify_decomposition(M: PolyMatrix, dec) -> Verdict:
    """Exact check of ``sum u_i (x) v_i = M`` plus per-term structure.

    Accepts a :class:`HomDecomposition`, an :class:`SMDecomposition`, or a plain
    sequence of ``(u, v)`` pairs (identity check only).
    """
    if isinstance(dec, (HomDecomposition, SMDecomposition)):
        terms = dec.terms
    else:
        terms = tuple(dec)
    total = PolyMatrix.zeros(M.rows, M.cols, M.nvars, M.basis, M.field)
    for idx, term in enumerate(terms):
        if isinstance(term, (HomTerm, SMTerm)):
            u, v = term.u, term.v
        else:
            u, v = term
        if len(u) != M.rows or len(v) != M.cols:
            return Verdict(False, f"term {idx}: shape {len(u)}x{len(v)} does not match {M.rows}x{M.cols}")
        if isinstance(term, HomTerm):
            if term.deg_u + term.deg_v != getattr(dec, "degree", term.deg_u + term.deg_v):
                return Verdict(False, f"term {idx}: degrees {term.deg_u}+{term.deg_v} != {dec.degree}")
            if not all(p.is_homogeneous(term.deg_u) for p in u):
                return Verdict(False, f"term {idx}: u is not homogeneous of degree {term.deg_u}")
            if not all(q.is_homogeneous(term.deg_v) for q in v):
                return Verdict(False, f"term {idx}: v is not homogeneous of degree {term.deg_v}")
        if isinstance(term, SMTerm):
            part = dec.partition
            rest = frozenset(range(part.d)) - term.S
            if not all(p.is_set_multilinear(part, term.S) for p in u):
                return Verdict(False, f"term {idx}: u is not set-multilinear in blocks {sorted(term.S)}")
            if not all(q.is_set_multilinear(part, rest) for q in v):
                return Verdict(False, f"term {idx}: v is not set-multilinear in blocks {sorted(rest)}")
        try:
            total = total + _outer(u, v)
        except (PolynomialError, ValueError) as exc:
            return Verdict(False, f"term {idx}: {exc}")
    if total != M:
        for i, j, p in M.cells():
            if total[i, j] != p:
                return Verdict(False, f"sum of terms differs from M at entry ({i + 1},{j + 1})")
    return Verdict(True)


def observed_counts(M: PolyMatrix, d: int) -> dict:
    """Term counts next to their bounds, for reports on how tight the bounds are."""
    r = exact_symbolic_rank(M)
    hom = hom_rank_decompose(M, d)
    return {"rank": r, "hom_terms": len(hom), "hom_bound": r * (d + 1)}
