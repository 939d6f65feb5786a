"""Rank methods: linear maps into matrices, flattenings, and the barrier formulas.

A ``waring`` map is defined on polynomials of degree ``<= d`` in ``n`` variables
through the images of divided-power monomials; a ``tensor`` map on
``Ten_{n,d}`` through the images of standard basis tensors. Python indices are
0-based throughout (tensor positions, block subsets); the JSON formats use
1-based indices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .field import QQ, Field, Scalar
from .linalg import ConstMatrix
from .poly import DIVIDED, STANDARD, Monomial, Polynomial, VariablePartition, monomials_of_degree, monomials_up_to
from .polymatrix import PolyMatrix

WARING = "waring"
TENSOR = "tensor"
FAMILIES = (WARING, TENSOR)


class RankMethodError(ValueError):
    pass


@dataclass(frozen=True)
class Tensor:
    """Order-``d`` tensor of side ``n`` with sparse entries keyed by 0-based index tuples."""

    n: int
    d: int
    entries: Mapping[tuple[int, ...], Scalar] = dc_field(default_factory=dict)
    field: Field = QQ

    def __post_init__(self):
        clean = {}
        for idx, c in self.entries.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != self.d or any(not 0 <= i < self.n for i in idx):
                raise RankMethodError(f"tensor index {idx} out of range for n={self.n}, d={self.d}")
            c = self.field(c)
            if c != 0:
                clean[idx] = c
        object.__setattr__(self, "entries", clean)

    def __hash__(self):
        return hash((self.n, self.d, frozenset(self.entries.items())))

    @classmethod
    def rank_one(cls, vectors: Sequence[Sequence], field: Field = QQ) -> Tensor:
        """``u_1 (x) ... (x) u_d``."""
        n = len(vectors[0])
        entries = {}
        for idx in itertools.product(range(n), repeat=len(vectors)):
            c = field(1)
            for j, i in enumerate(idx):
                c = c * field(vectors[j][i])
            if c != 0:
                entries[idx] = c
        return cls(n, len(vectors), entries, field)

    @classmethod
    def diagonal(cls, n: int, d: int, field: Field = QQ) -> Tensor:
        return cls(n, d, {(i,) * d: 1 for i in range(n)}, field)

    def __add__(self, other: Tensor) -> Tensor:
        if (self.n, self.d) != (other.n, other.d):
            raise RankMethodError("tensor shapes differ")
        out = dict(self.entries)
        for k, c in other.entries.items():
            out[k] = out.get(k, 0) + c
        return Tensor(self.n, self.d, out, self.field)

    def scale(self, c) -> Tensor:
        return Tensor(self.n, self.d, {k: v * self.field(c) for k, v in self.entries.items()}, self.field)

    def partition(self) -> VariablePartition:
        return VariablePartition.uniform(self.d, self.n)

    def to_polynomial(self) -> Polynomial:
        """Set-multilinear polynomial in ``d`` blocks of ``n`` variables (block ``j`` owns ``j*n .. j*n+n-1``)."""
        nv = self.n * self.d
        terms = {}
        for idx, c in self.entries.items():
            e = [0] * nv
            for j, i in enumerate(idx):
                e[j * self.n + i] = 1
            terms[tuple(e)] = c
        return Polynomial(nv, terms, STANDARD, self.field)

    @classmethod
    def from_polynomial(cls, p: Polynomial, n: int, d: int) -> Tensor:
        part = VariablePartition.uniform(d, n)
        if not p.is_set_multilinear(part):
            raise RankMethodError("polynomial is not set-multilinear in d blocks of n variables")
        p = p.to_basis(STANDARD)
        entries = {}
        for e, c in p.terms.items():
            idx = [0] * d
            for v, k in enumerate(e):
                if k:
                    idx[v // n] = v % n
            entries[tuple(idx)] = c
        return cls(n, d, entries, p.field)


def basis_indices(family: str, n: int, d: int) -> list[tuple[int, ...]]:
    """Basis of the domain: monomials of degree ``<= d`` or tensor positions."""
    if family == WARING:
        return monomials_up_to(n, d)
    if family == TENSOR:
        return list(itertools.product(range(n), repeat=d))
    raise RankMethodError(f"unknown family {family!r}")


@dataclass(frozen=True)
class LinearMap:
    """Linear map into ``m x m`` matrices, given by basis images (missing images are zero)."""

    family: str
    n: int
    d: int
    m: int
    images: Mapping[tuple[int, ...], ConstMatrix] = dc_field(default_factory=dict)
    field: Field = QQ

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise RankMethodError(f"unknown family {self.family!r}")
        if self.n < 1 or self.d < 1 or self.m < 1:
            raise RankMethodError("n, d and m must be positive")
        clean = {}
        for key, A in self.images.items():
            key = tuple(int(k) for k in key)
            self._check_index(key)
            A = linalg.as_matrix(A, self.field)
            if linalg.shape(A) != (self.m, self.m):
                raise RankMethodError(f"image of {key} has shape {linalg.shape(A)}, expected {self.m}x{self.m}")
            if not linalg.is_zero_matrix(A):
                clean[key] = A
        object.__setattr__(self, "images", clean)

    def _check_index(self, key: tuple[int, ...]) -> None:
        if self.family == WARING:
            if len(key) != self.n or min(key, default=0) < 0 or sum(key) > self.d:
                raise RankMethodError(f"monomial {key} is not a degree <= {self.d} exponent in {self.n} variables")
        elif len(key) != self.d or any(not 0 <= i < self.n for i in key):
            raise RankMethodError(f"tensor index {key} out of range")

    def __hash__(self):
        return hash((self.family, self.n, self.d, self.m, frozenset(self.images.items())))

    def image(self, key) -> ConstMatrix:
        return self.images.get(tuple(key), linalg.zeros(self.m, self.m))

    def is_zero(self) -> bool:
        return not self.images


def apply_map(L: LinearMap, f) -> ConstMatrix:
    """``L(f)`` by linearity: ``sum_e coeff_e(f) L(basis_e)``."""
    if L.family == WARING:
        if not isinstance(f, Polynomial):
            raise RankMethodError("waring maps act on polynomials")
        if f.nvars != L.n:
            raise RankMethodError(f"polynomial has {f.nvars} variables, map expects {L.n}")
        if not f.is_zero() and f.degree > L.d:
            raise RankMethodError(f"polynomial degree {f.degree} exceeds {L.d}")
        coeffs = f.to_basis(DIVIDED).terms
    else:
        if isinstance(f, Polynomial):
            f = Tensor.from_polynomial(f, L.n, L.d)
        if not isinstance(f, Tensor):
            raise RankMethodError("tensor maps act on tensors")
        if (f.n, f.d) != (L.n, L.d):
            raise RankMethodError(f"tensor of shape (n={f.n}, d={f.d}) for a map on (n={L.n}, d={L.d})")
        coeffs = f.entries
    field = L.field
    acc = [[field(0)] * L.m for _ in range(L.m)]
    for key, c in coeffs.items():
        A = L.images.get(key)
        if A is None:
            continue
        for i in range(L.m):
            row, Ai = acc[i], A[i]
            for j in range(L.m):
                if Ai[j] != 0:
                    row[j] = row[j] + c * Ai[j]
    return tuple(tuple(field(x) for x in row) for row in acc)


def symbolic_image_waring(L: LinearMap) -> PolyMatrix:
    """``M(y0, y) = L((y0 + sum y_i x_i)^d)`` over variables ``(y0, y1..yn)``.

    Expanding the power in the divided basis of ``x``, the coefficient of
    ``x^e`` is ``d!/(d-|e|)! * y0^(d-|e|) * prod y_i^e_i`` (standard basis in y).
    Every entry is homogeneous of degree ``d``.
    """
    if L.family != WARING:
        raise RankMethodError("not a waring map")
    nv = L.n + 1
    if L.is_zero():
        return PolyMatrix.zeros(L.m, L.m, nv, STANDARD, L.field)
    keys = sorted(L.images)
    coeffs = []
    for e in keys:
        e0 = L.d - sum(e)
        w = math.factorial(L.d) // math.factorial(e0)
        coeffs.append(Polynomial(nv, {(e0,) + e: w}, STANDARD, L.field))
    return PolyMatrix.linear_combination([L.images[k] for k in keys], coeffs)


def symbolic_image_tensor(L: LinearMap) -> PolyMatrix:
    """``M(x) = L(x_1 (x) ... (x) x_d) = sum_idx A_idx prod_j x_{j, idx_j}`` over ``n*d`` variables."""
    if L.family != TENSOR:
        raise RankMethodError("not a tensor map")
    nv = L.n * L.d
    if L.is_zero():
        return PolyMatrix.zeros(L.m, L.m, nv, STANDARD, L.field)
    keys = sorted(L.images)
    coeffs = []
    for idx in keys:
        e = [0] * nv
        for j, i in enumerate(idx):
            e[j * L.n + i] = 1
        coeffs.append(Polynomial(nv, {tuple(e): 1}, STANDARD, L.field))
    return PolyMatrix.linear_combination([L.images[k] for k in keys], coeffs)


def symbolic_image(L: LinearMap) -> PolyMatrix:
    return symbolic_image_waring(L) if L.family == WARING else symbolic_image_tensor(L)


def simple_variables(L: LinearMap) -> int:
    return L.n + 1 if L.family == WARING else L.n * L.d


# ---------------------------------------------------------------------------
# built-in flattenings


def catalecticant(f: Polynomial, k: int, d: int | None = None) -> ConstMatrix:
    """Partial-derivative flattening of a homogeneous ``f`` of degree ``d``.

    Rows are indexed by degree-``k`` monomials ``a``, columns by degree-``(d-k)``
    monomials ``b`` (both grlex descending); the entry is the coefficient of
    ``x^b`` in ``d_a f``, i.e. the divided-basis coefficient of ``x^(a+b)``.
    """
    if d is None:
        if f.is_zero():
            raise RankMethodError("degree of the zero polynomial must be given explicitly")
        d = int(f.degree)
    if not f.is_homogeneous(d):
        raise RankMethodError(f"catalecticant needs a homogeneous polynomial of degree {d}")
    if not 0 <= k <= d:
        raise RankMethodError(f"k={k} out of range 0..{d}")
    if f.field.characteristic and f.field.characteristic <= d:
        raise RankMethodError("divided powers need characteristic 0 or above the degree")
    fd = f.to_basis(DIVIDED)
    rows = monomials_of_degree(f.nvars, k)
    cols = monomials_of_degree(f.nvars, d - k)
    return tuple(
        tuple(fd.terms.get(tuple(x + y for x, y in zip(a, b)), f.field(0)) for b in cols) for a in rows
    )


def _pad(A: ConstMatrix, m: int) -> ConstMatrix:
    r, c = linalg.shape(A)
    return tuple(tuple(A[i][j] if i < r and j < c else 0 for j in range(m)) for i in range(m))


def catalecticant_map(n: int, d: int, k: int, field: Field = QQ) -> LinearMap:
    """The catalecticant as a waring map, zero-padded to a square matrix.

    Acts on the degree-``d`` part of its input and kills lower degrees, so
    ``L(l^d)`` has rank at most 1 for every affine ``l``.
    """
    rows = monomials_of_degree(n, k)
    cols = monomials_of_degree(n, d - k)
    m = max(len(rows), len(cols))
    images = {}
    for e in monomials_of_degree(n, d):
        A = [[0] * m for _ in range(m)]
        for i, a in enumerate(rows):
            for j, b in enumerate(cols):
                if tuple(x + y for x, y in zip(a, b)) == e:
                    A[i][j] = 1
        images[e] = A
    return LinearMap(WARING, n, d, m, images, field)


def _normalize_modes(S, d: int) -> tuple[int, ...]:
    S = tuple(sorted(set(int(j) for j in S)))
    if any(not 0 <= j < d for j in S):
        raise RankMethodError(f"mode subset {S} out of range for d={d}")
    if not S or len(S) == d:
        raise RankMethodError("mode subset must be nonempty and proper")
    return S


def mode_flattening(T: Tensor, S) -> ConstMatrix:
    """Group the modes in ``S`` as rows and the rest as columns (lexicographic order)."""
    S = _normalize_modes(S, T.d)
    rest = tuple(j for j in range(T.d) if j not in S)
    rows = list(itertools.product(range(T.n), repeat=len(S)))
    cols = list(itertools.product(range(T.n), repeat=len(rest)))
    row_of = {r: i for i, r in enumerate(rows)}
    col_of = {c: i for i, c in enumerate(cols)}
    A = [[T.field(0)] * len(cols) for _ in rows]
    for idx, c in T.entries.items():
        A[row_of[tuple(idx[j] for j in S)]][col_of[tuple(idx[j] for j in rest)]] = c
    return tuple(tuple(r) for r in A)


def mode_flattening_map(n: int, d: int, S, field: Field = QQ) -> LinearMap:
    """The mode flattening as a tensor map, zero-padded to a square matrix."""
    S = _normalize_modes(S, d)
    rest = tuple(j for j in range(d) if j not in S)
    rows = {r: i for i, r in enumerate(itertools.product(range(n), repeat=len(S)))}
    cols = {c: i for i, c in enumerate(itertools.product(range(n), repeat=len(rest)))}
    m = max(len(rows), len(cols))
    images = {}
    for idx in itertools.product(range(n), repeat=d):
        A = [[0] * m for _ in range(m)]
        A[rows[tuple(idx[j] for j in S)]][cols[tuple(idx[j] for j in rest)]] = 1
        images[idx] = A
    return LinearMap(TENSOR, n, d, m, images, field)


# ---------------------------------------------------------------------------
# bounds


def barrier_bound(family: str, n: int, d: int) -> int:
    """Per-unit-``r`` cap on what a rank method can certify.

    waring: ``(d+1) * C(n + floor(d/2), n)``; tensor: ``2^d * n^floor(d/2)``.
    """
    if n < 1 or d < 1:
        raise RankMethodError("n and d must be positive")
    h = d // 2
    if family == WARING:
        return (d + 1) * math.comb(n + h, n)
    if family == TENSOR:
        return 2**d * n**h
    raise RankMethodError(f"unknown family {family!r}")


@dataclass(frozen=True)
class ReferenceValues:
    n: int
    d: int
    ah95_generic_waring: int
    gl17_waring_intro: int
    gl17_waring_section4: int
    aft11_tensor: int | float  # int whenever n is a power of two
    aft11_tensor_rounded: int
    random_tensor_rank: Fraction
    trivial_explicit_tensor: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "ah95_generic_waring": self.ah95_generic_waring,
            "gl17_waring_intro": self.gl17_waring_intro,
            "gl17_waring_section4": self.gl17_waring_section4,
            "aft11_tensor": self.aft11_tensor,
            "aft11_tensor_rounded": self.aft11_tensor_rounded,
            "aft11_log_base": 2,
            "random_tensor_rank": str(self.random_tensor_rank),
            "trivial_explicit_tensor": self.trivial_explicit_tensor,
        }


def _log2_exact(n: int):
    if n & (n - 1) == 0:
        return n.bit_length() - 1
    return math.log2(n)


def reference_values(n: int, d: int) -> ReferenceValues:
    """Literature values for context; none of them enters an inequality check.

    The best explicit Waring bound appears with two different binomials in the
    source; both are reported. The ``d log n`` term of the tensor bound uses log base 2.
    """
    if n < 1 or d < 1:
        raise RankMethodError("n and d must be positive")
    h = d // 2
    ah95 = -(-math.comb(n + d - 1, n - 1) // n)
    gl_intro = math.comb(n + h - 1, h) + n // 2 - 1
    gl_sec4 = math.comb(n + h - 1, n) + n // 2 - 1
    aft = 2 * n**h + n - d * _log2_exact(n)
    return ReferenceValues(
        n, d, ah95, gl_intro, gl_sec4, aft, int(round(aft)),
        Fraction(n ** (d - 1), d), n**h,
    )


@dataclass(frozen=True)
class LowerBoundResult:
    mu_f: int
    mu_S: int
    bound: Fraction
    barrier: int
    family: str = ""
    mu_S_source: str = "analytic"

    @property
    def ceiling(self) -> int:
        return math.ceil(self.bound)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "mu_f": self.mu_f,
            "mu_S": self.mu_S,
            "mu_S_source": self.mu_S_source,
            "bound": str(self.bound),
            "bound_ceiling": self.ceiling,
            "barrier": self.barrier,
        }


def lower_bound(L: LinearMap, f, mu_S: int, mu_S_source: str = "analytic") -> LowerBoundResult:
    """``rank(L(f)) / mu_S``: a lower bound on the number of simple summands of ``f``."""
    if mu_S < 1:
        raise RankMethodError("mu_S must be at least 1; a map vanishing on the simple set certifies nothing")
    mu_f = linalg.rank(apply_map(L, f), L.field)
    bound = Fraction(mu_f, mu_S)
    barrier = barrier_bound(L.family, L.n, L.d)
    if bound > barrier:
        raise RankMethodError(
            f"bound {bound} exceeds the barrier {barrier}; mu_S={mu_S} cannot be a valid cap on the simple set"
        )
    return LowerBoundResult(mu_f, mu_S, bound, barrier, L.family, mu_S_source)
