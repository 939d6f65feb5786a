"""Exact linear algebra on constant matrices.

Rows are converted to integer vectors before elimination: over QQ each row is
scaled by the lcm of its denominators (row scaling preserves rank and row
space), over GF(p) the residues are used directly. Elimination then runs on
Python ints only, with content (gcd) removal after every fraction-free update.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .field import QQ, Field, GFElement, Scalar

ConstMatrix = tuple[tuple[Scalar, ...], ...]


class DimensionError(ValueError):
    pass


def as_matrix(rows: Sequence[Sequence], field: Field = QQ) -> ConstMatrix:
    """Coerce nested sequences into an immutable rectangular matrix."""
    out = tuple(tuple(field(x) for x in row) for row in rows)
    if out:
        width = len(out[0])
        for i, row in enumerate(out):
            if len(row) != width:
                raise DimensionError(f"row {i} has length {len(row)}, expected {width}")
    return out


def zeros(m: int, k: int) -> ConstMatrix:
    return tuple((0,) * k for _ in range(m))


def shape(A: ConstMatrix) -> tuple[int, int]:
    return (len(A), len(A[0]) if A else 0)


def mat_add(A: ConstMatrix, B: ConstMatrix) -> ConstMatrix:
    if shape(A) != shape(B):
        raise DimensionError(f"shape mismatch {shape(A)} vs {shape(B)}")
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(c, A: ConstMatrix) -> ConstMatrix:
    return tuple(tuple(c * a for a in row) for row in A)


def mat_mul(A: ConstMatrix, B: ConstMatrix) -> ConstMatrix:
    if shape(A)[1] != shape(B)[0]:
        raise DimensionError(f"cannot multiply {shape(A)} by {shape(B)}")
    cols = list(zip(*B))
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), 0) for col in cols) for row in A)


def outer(u: Sequence, v: Sequence) -> ConstMatrix:
    return tuple(tuple(a * b for b in v) for a in u)


def is_zero_matrix(A: ConstMatrix) -> bool:
    return all(x == 0 for row in A for x in row)


def vectorize(A: ConstMatrix) -> tuple:
    """Row-major flattening."""
    return tuple(x for row in A for x in row)


def _modulus(field: Field) -> int:
    return field.characteristic


def to_int_vector(vec: Sequence, field: Field) -> list[int]:
    p = _modulus(field)
    if p:
        return [x.v if isinstance(x, GFElement) else int(field(x)) for x in vec]
    den = 1
    for x in vec:
        if type(x) is Fraction and x.denominator != 1:
            den = den * x.denominator // math.gcd(den, x.denominator)
    if den == 1:
        return [int(x) for x in vec]
    return [int(x * den) for x in vec]


class Echelon:
    """Incrementally maintained echelon basis of a row space.

    ``add`` inserts a vector if it is independent of the current rows;
    ``contains`` decides span membership exactly.
    """

    def __init__(self, ncols: int, field: Field = QQ):
        self.ncols = ncols
        self.field = field
        self.p = _modulus(field)
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, v: list[int]) -> list[int]:
        p = self.p
        for row, piv in zip(self.rows, self.pivots):
            c = v[piv]
            if not c:
                continue
            if p:
                # rows are normalized to pivot 1 mod p
                v = [(a - c * b) % p for a, b in zip(v, row)]
            else:
                h = row[piv]
                g = math.gcd(h, c)
                h, c = h // g, c // g
                v = [h * a - c * b for a, b in zip(v, row)]
                cont = 0
                for a in v:
                    if a:
                        cont = math.gcd(cont, a)
                        if cont == 1:
                            break
                if cont > 1:
                    v = [a // cont for a in v]
        return v

    def residual(self, vec: Sequence) -> list[int]:
        if len(vec) != self.ncols:
            raise DimensionError(f"vector of length {len(vec)} in a space of width {self.ncols}")
        return self._reduce(to_int_vector(vec, self.field))

    def add(self, vec: Sequence) -> bool:
        v = self.residual(vec)
        for j, a in enumerate(v):
            if a:
                if self.p:
                    inv = pow(a, -1, self.p)
                    v = [(b * inv) % self.p for b in v]
                self.rows.append(v)
                self.pivots.append(j)
                return True
        return False

    def contains(self, vec: Sequence) -> bool:
        return not any(self.residual(vec))


def rank(A: Sequence[Sequence], field: Field = QQ) -> int:
    """Exact rank of a constant matrix."""
    if not A:
        return 0
    ncols = len(A[0])
    ech = Echelon(ncols, field)
    for row in A:
        if len(row) != ncols:
            raise DimensionError("ragged matrix")
        ech.add(row)
        if ech.rank == ncols:
            break
    return ech.rank


def span_rank(vectors: Sequence[Sequence], field: Field = QQ) -> int:
    return rank(vectors, field)
