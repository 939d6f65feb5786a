"""Rank methods for depth-3 formulas through a generic symmetric polynomial.

A depth-3 formula of top fan-in ``s`` computing a degree-``d`` homogeneous
polynomial is a sum of ``s`` images of the map

    psi(y) = H_d[ prod_i (1 + sum_j y_ij x_j) ] = Sym_d(ell_1, ..., ell_D),

with ``ell_i = sum_j y_ij x_j``. Each coordinate of ``psi`` (the coefficient of
one ``x``-monomial) is a polynomial in the ``D x n`` matrix of variables ``y``
that is set-multilinear in the rows and symmetric under permuting them. Any
matrix whose entries lie in that space yields a rank method for depth-3.

Variable layout: ``y_ij`` (row ``i`` in ``[D]``, column ``j`` in ``[n]``, both
0-based) is variable ``i * n + j``; row ``i`` is block ``i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

from . import linalg
from .field import QQ, Field
from .poly import STANDARD, Monomial, Polynomial, VariablePartition, monomials_of_degree
from .polymatrix import PolyMatrix


class Depth3Error(ValueError):
    pass


def sym_poly(d: int, forms: list[Polynomial]) -> Polynomial:
    """Elementary symmetric polynomial ``e_d`` evaluated at ``forms``.

    Runs the usual recurrence ``E_k <- E_k + f * E_{k-1}`` over the forms, so the
    cost is ``O(d * D)`` polynomial products rather than ``C(D, d)``.
    """
    if not forms:
        raise Depth3Error("sym_poly needs at least one form to fix the variable set")
    nvars, field = forms[0].nvars, forms[0].field
    for f in forms:
        if f.nvars != nvars or f.field != field:
            raise Depth3Error("forms must share a variable set and field")
    forms = [f.to_basis(STANDARD) for f in forms]
    if d < 0 or d > len(forms):
        return Polynomial.zero(nvars, STANDARD, field)
    E = [Polynomial.constant(nvars, 1, STANDARD, field)] + [Polynomial.zero(nvars, STANDARD, field)] * d
    for f in forms:
        for k in range(d, 0, -1):
            E[k] = E[k] + f * E[k - 1]
    return E[d]


def y_index(n: int, i: int, j: int) -> int:
    return i * n + j


def y_partition(n: int, D: int) -> VariablePartition:
    return VariablePartition.uniform(D, n)


def generic_forms(n: int, D: int, field: Field = QQ) -> list[Polynomial]:
    """``ell_i = sum_j y_ij x_j`` over ``D*n + n`` variables (``y`` first, then ``x``)."""
    nv = D * n + n
    forms = []
    for i in range(D):
        terms = {}
        for j in range(n):
            e = [0] * nv
            e[y_index(n, i, j)] = 1
            e[D * n + j] = 1
            terms[tuple(e)] = 1
        forms.append(Polynomial(nv, terms, STANDARD, field))
    return forms


@dataclass(frozen=True)
class PsiImage:
    """Coordinates of ``psi`` keyed by degree-``d`` exponent vectors in ``x``."""

    n: int
    D: int
    d: int
    coords: dict

    @property
    def partition(self) -> VariablePartition:
        return y_partition(self.n, self.D)

    def keys(self) -> list[Monomial]:
        return monomials_of_degree(self.n, self.d)

    def as_matrix(self) -> PolyMatrix:
        """All coordinates as a single column, in grlex-descending key order."""
        field = next(iter(self.coords.values())).field
        return PolyMatrix([[self.coords[e]] for e in self.keys()], self.D * self.n, STANDARD, field)


def build_psi(n: int, D: int, d: int, field: Field = QQ, check: bool = True) -> PsiImage:
    """Expand ``Sym_d`` of the generic forms and collect coefficients of each ``x``-monomial."""
    if n < 1 or d < 1:
        raise Depth3Error("need n >= 1 and d >= 1")
    if D < d:
        raise Depth3Error(f"D={D} < d={d}: psi is identically zero")
    ny = D * n
    full = sym_poly(d, generic_forms(n, D, field))
    coords: dict[Monomial, dict] = {e: {} for e in monomials_of_degree(n, d)}
    for e, c in full.terms.items():
        coords[e[ny:]][e[:ny]] = c
    image = PsiImage(n, D, d, {x: Polynomial(ny, t, STANDARD, field) for x, t in coords.items()})
    if check:
        part = image.partition
        for x, p in image.coords.items():
            if not is_ssm(p, part):
                raise AssertionError(f"coordinate {x} of psi is not set-symmetric multilinear")
    return image


def _block_permutation(part: VariablePartition, a: int, b: int) -> list[int]:
    """Variable renaming that swaps blocks ``a`` and ``b`` position by position."""
    mapping = list(range(part.num_vars))
    for u, v in zip(part.blocks[a], part.blocks[b]):
        mapping[u], mapping[v] = v, u
    return mapping


def is_ssm(p: Polynomial, blocks: VariablePartition) -> bool:
    """Set-multilinear (at most one variable per block, homogeneous) and block-symmetric.

    Symmetry is tested on adjacent block transpositions, which generate the
    full symmetric group.
    """
    sizes = {len(b) for b in blocks.blocks}
    if len(sizes) > 1:
        raise Depth3Error(f"blocks must have equal size, got sizes {sorted(sizes)}")
    blocks.check(p.nvars)
    if p.is_zero():
        return True
    if not p.is_homogeneous():
        return False
    if any(blocks.monomial_signature(e) is None for e in p.terms):
        return False
    p = p.to_basis(STANDARD)
    for a in range(blocks.d - 1):
        if p.rename(p.nvars, _block_permutation(blocks, a, a + 1)) != p:
            return False
    return True


def polarize(mono: Monomial, D: int, field: Field = QQ) -> Polynomial:
    """Sum over injections of the monomial's ``d`` slots into ``D`` blocks of ``prod y_{block, var}``.

    No normalization: ``x_1^2`` with ``D = 2`` maps to ``2 y_11 y_21``.
    """
    mono = tuple(int(k) for k in mono)
    n, d = len(mono), sum(mono)
    if any(k < 0 for k in mono):
        raise Depth3Error("exponents must be nonnegative")
    if D < d:
        raise Depth3Error(f"D={D} < degree {d}: no injections")
    slots = [j for j, k in enumerate(mono) for _ in range(k)]
    terms: dict[Monomial, int] = {}
    for rows in itertools.permutations(range(D), d):
        e = [0] * (D * n)
        for i, j in zip(rows, slots):
            e[y_index(n, i, j)] = 1
        key = tuple(e)
        terms[key] = terms.get(key, 0) + 1
    return Polynomial(D * n, terms, STANDARD, field)


@dataclass
class PolarizationBasis:
    """Images of all degree-``d`` monomials, reduced to an echelon form for membership tests."""

    n: int
    D: int
    d: int
    field: Field = QQ

    def __post_init__(self):
        self.images = [polarize(e, self.D, self.field) for e in monomials_of_degree(self.n, self.d)]
        support = sorted({m for p in self.images for m in p.terms})
        self.index = {m: k for k, m in enumerate(support)}
        self.echelon = linalg.Echelon(len(support), self.field)
        for p in self.images:
            self.echelon.add(self._vector(p))

    def _vector(self, p: Polynomial) -> list:
        v = [0] * len(self.index)
        for m, c in p.terms.items():
            v[self.index[m]] = c
        return v

    @property
    def dim(self) -> int:
        return self.echelon.rank

    def contains(self, p: Polynomial) -> bool:
        p = p.to_basis(STANDARD)
        if p.nvars != self.D * self.n:
            raise Depth3Error(f"expected {self.D * self.n} variables, got {p.nvars}")
        if any(m not in self.index for m in p.terms):
            return False
        return self.echelon.contains(self._vector(p))


def polarization_dim(n: int, D: int, d: int, field: Field = QQ) -> int:
    return PolarizationBasis(n, D, d, field).dim


def expected_dim(n: int, d: int) -> int:
    """Dimension of degree-``d`` forms in ``n`` variables."""
    return comb(n + d - 1, n - 1)


def validate_rank_method(M: PolyMatrix, n: int, D: int, d: int) -> bool:
    """True iff every entry of ``M`` lies in the span of the polarized degree-``d`` monomials."""
    if M.nvars != D * n:
        raise Depth3Error(f"matrix has {M.nvars} variables, layout needs D*n = {D * n}")
    basis = PolarizationBasis(n, D, d, M.field)
    return all(basis.contains(p) for _, _, p in M.cells())


def offending_entry(M: PolyMatrix, n: int, D: int, d: int) -> tuple[int, int] | None:
    """First ``(row, col)`` whose entry is outside the span, or None."""
    basis = PolarizationBasis(n, D, d, M.field)
    for i, j, p in M.cells():
        if not basis.contains(p):
            return i, j
    return None


__all__ = [
    "Depth3Error",
    "PolarizationBasis",
    "PsiImage",
    "build_psi",
    "expected_dim",
    "generic_forms",
    "is_ssm",
    "offending_entry",
    "polarization_dim",
    "polarize",
    "sym_poly",
    "validate_rank_method",
    "y_index",
    "y_partition",
]
