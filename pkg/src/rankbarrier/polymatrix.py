"""Matrices of polynomials: symbolic rank, rank factorizations, coefficient spaces."""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from . import linalg
from .field import QQ, Field, FieldError, require_randomized_safety
from .linalg import ConstMatrix, DimensionError, Echelon
from .poly import DIVIDED, STANDARD, Polynomial, PolynomialError, VariablePartition, grlex_key


class PolyMatrix:
    """Immutable ``rows x cols`` grid of polynomials sharing variables, basis and field."""

    __slots__ = ("rows", "cols", "entries", "nvars", "basis", "field")

    def __init__(self, entries: Sequence[Sequence[Polynomial]], nvars: int | None = None,
                 basis: str | None = None, field: Field | None = None):
        grid = tuple(tuple(row) for row in entries)
        self.rows = len(grid)
        self.cols = len(grid[0]) if grid else 0
        for i, row in enumerate(grid):
            if len(row) != self.cols:
                raise DimensionError(f"row {i} has {len(row)} entries, expected {self.cols}")
        if grid and self.cols:
            first = grid[0][0]
            nvars = first.nvars if nvars is None else nvars
            basis = first.basis if basis is None else basis
            field = first.field if field is None else field
            for row in grid:
                for p in row:
                    if p.nvars != nvars or p.basis != basis or p.field != field:
                        raise PolynomialError("matrix entries must share variables, basis and field")
        self.entries = grid
        self.nvars = 0 if nvars is None else nvars
        self.basis = basis or STANDARD
        self.field = field or QQ

    # ----- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int, nvars: int, basis: str = STANDARD, field: Field = QQ) -> PolyMatrix:
        z = Polynomial.zero(nvars, basis, field)
        return cls([[z] * cols for _ in range(rows)], nvars, basis, field)

    @classmethod
    def from_constant(cls, A: Sequence[Sequence], nvars: int, basis: str = STANDARD,
                      field: Field = QQ) -> PolyMatrix:
        return cls([[Polynomial.constant(nvars, x, basis, field) for x in row] for row in A],
                   nvars, basis, field)

    @classmethod
    def outer(cls, u: Sequence[Polynomial], v: Sequence[Polynomial]) -> PolyMatrix:
        return cls([[a * b for b in v] for a in u])

    @classmethod
    def linear_combination(cls, mats: Sequence[ConstMatrix], coeffs: Sequence[Polynomial]) -> PolyMatrix:
        """``sum_i coeffs[i] * mats[i]`` for constant matrices ``mats``."""
        if not coeffs:
            raise ValueError("empty combination")
        m, k = linalg.shape(mats[0])
        z = coeffs[0].zero_like()
        out = [[z] * k for _ in range(m)]
        for A, c in zip(mats, coeffs):
            if linalg.shape(A) != (m, k):
                raise DimensionError("matrices in a combination must share a shape")
            for i in range(m):
                for j in range(k):
                    if A[i][j] != 0:
                        out[i][j] = out[i][j] + c.scale(A[i][j])
        return cls(out, coeffs[0].nvars, coeffs[0].basis, coeffs[0].field)

    # ----- access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        i, j = ij
        return self.entries[i][j]

    def __iter__(self):
        return iter(self.entries)

    def cells(self) -> Iterable[tuple[int, int, Polynomial]]:
        for i, row in enumerate(self.entries):
            for j, p in enumerate(row):
                yield i, j, p

    def is_zero(self) -> bool:
        return all(p.is_zero() for _, _, p in self.cells())

    @property
    def max_degree(self) -> int:
        """Largest total degree of an entry; 0 for the zero matrix."""
        return max((int(p.degree) for _, _, p in self.cells() if not p.is_zero()), default=0)

    def map(self, fn) -> PolyMatrix:
        """Apply ``fn`` entrywise; ``fn`` must keep variables, basis and field."""
        return PolyMatrix([[fn(p) for p in row] for row in self.entries], self.nvars, self.basis, self.field)

    def to_basis(self, basis: str) -> PolyMatrix:
        if basis == self.basis:
            return self
        return PolyMatrix([[p.to_basis(basis) for p in row] for row in self.entries], self.nvars, basis, self.field)

    def homogeneous_component(self, t: int) -> PolyMatrix:
        return self.map(lambda p: p.homogeneous_component(t))

    def truncate(self, t: int) -> PolyMatrix:
        return self.map(lambda p: p.truncate(t))

    def shift(self, a: Sequence, max_degree: int | None = None) -> PolyMatrix:
        return self.map(lambda p: p.shift(a, max_degree))

    def transpose(self) -> PolyMatrix:
        return PolyMatrix([list(col) for col in zip(*self.entries)], self.nvars, self.basis, self.field)

    def evaluate(self, point: Sequence) -> ConstMatrix:
        return tuple(tuple(p.evaluate(point) for p in row) for row in self.entries)

    def is_homogeneous(self, d: int) -> bool:
        return all(p.is_homogeneous(d) for _, _, p in self.cells())

    def is_set_multilinear(self, part: VariablePartition, S=None) -> bool:
        return all(p.is_set_multilinear(part, S) for _, _, p in self.cells())

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return PolyMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
                          self.nvars, self.basis, self.field)

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return PolyMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
                          self.nvars, self.basis, self.field)

    def scale(self, c) -> PolyMatrix:
        return self.map(lambda p: p.scale(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def to_str(self, names=None) -> str:
        return "[" + ",\n ".join("[" + ", ".join(p.to_str(names) for p in row) + "]" for row in self.entries) + "]"

    def __repr__(self) -> str:
        return f"PolyMatrix({self.rows}x{self.cols}, nvars={self.nvars})"


def sum_matrices(mats: Sequence[PolyMatrix], like: PolyMatrix) -> PolyMatrix:
    total = PolyMatrix.zeros(like.rows, like.cols, like.nvars, like.basis, like.field)
    for A in mats:
        total = total + A
    return total


# ---------------------------------------------------------------------------
# fraction-free elimination


@dataclass
class _Step:
    row: int
    col: int
    pivot: Polynomial
    left: dict[int, Polynomial]
    right: dict[int, Polynomial]


def _pivot_key(i: int, j: int, p: Polynomial):
    # smallest support first, then grlex-smallest leading monomial, then position
    return (len(p.terms), grlex_key(p.leading_monomial()), i, j)


def _bareiss(M: PolyMatrix) -> list[_Step]:
    """Full-pivoting Bareiss elimination; returns one step per pivot.

    After step ``k`` the live entries are ``(k+1)``-minors of ``M``, so every
    division by the previous pivot is exact.
    """
    M = M.to_basis(STANDARD)
    A = {(i, j): p for i, j, p in M.cells()}
    rows = list(range(M.rows))
    cols = list(range(M.cols))
    prev = Polynomial.constant(M.nvars, 1, STANDARD, M.field)
    steps: list[_Step] = []
    while rows and cols:
        best = None
        for i in rows:
            for j in cols:
                p = A[i, j]
                if p.terms:
                    key = _pivot_key(i, j, p)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, i0, j0 = best
        piv = A[i0, j0]
        steps.append(_Step(i0, j0, piv, {i: A[i, j0] for i in rows}, {j: A[i0, j] for j in cols}))
        rows.remove(i0)
        cols.remove(j0)
        for i in rows:
            a_i = A[i, j0]
            for j in cols:
                num = piv * A[i, j]
                a_j = A[i0, j]
                if a_i.terms and a_j.terms:
                    num = num - a_i * a_j
                A[i, j] = num.exact_div(prev) if num.terms else num
        prev = piv
    return steps


def exact_symbolic_rank(M: PolyMatrix) -> int:
    """Rank of ``M`` over the field of rational functions in its variables."""
    return len(_bareiss(M))


def default_sample_range(M: PolyMatrix) -> int:
    return 100 * max(M.max_degree, 1) * max(M.rows, M.cols, 1)


def randomized_symbolic_rank(M: PolyMatrix, sample_range: int | None = None, trials: int = 3,
                             seed: int | str | None = 0) -> int:
    """Max rank of ``M(a)`` over ``trials`` random grid points.

    Never exceeds the symbolic rank; equals it except with probability at most
    ``(deg * size / sample_range) ** trials``.
    """
    if M.rows == 0 or M.cols == 0:
        return 0
    deg = M.max_degree
    if sample_range is None:
        sample_range = default_sample_range(M)
    if sample_range <= deg:
        raise FieldError(f"sample range {sample_range} must exceed the entry degree {deg}")
    M.field.check_sample_range(sample_range)
    require_randomized_safety(M.field, deg, max(M.rows, M.cols))
    if trials < 1:
        raise ValueError("trials must be positive")
    if deg == 0:
        trials = 1
    rng = random.Random(seed)
    best = 0
    cap = min(M.rows, M.cols)
    for _ in range(trials):
        point = [rng.randrange(sample_range) for _ in range(M.nvars)]
        best = max(best, linalg.rank(M.evaluate(point), M.field))
        if best == cap:
            break
    return best


# ---------------------------------------------------------------------------
# rank factorization


@dataclass(frozen=True)
class RankFactorization:
    """``M = sum_i left[:, i] (x) right[i, :] / denominators[i]``.

    ``pivots`` holds the elimination pivots ``p_1..p_r``; denominators are the
    products ``p_{i-1} p_i`` with ``p_0 = 1``.
    """

    left: PolyMatrix
    right: PolyMatrix
    denominators: tuple[Polynomial, ...]
    pivots: tuple[Polynomial, ...] = ()
    pivot_positions: tuple[tuple[int, int], ...] = ()

    @property
    def rank(self) -> int:
        return len(self.denominators)

    def column(self, i: int) -> tuple[Polynomial, ...]:
        return tuple(self.left[r, i] for r in range(self.left.rows))

    def row(self, i: int) -> tuple[Polynomial, ...]:
        return tuple(self.right[i, c] for c in range(self.right.cols))

    def degrees(self) -> dict[str, list[int]]:
        """Degrees of the factors, for reporting."""
        def deg(vec):
            return max((int(p.degree) for p in vec if not p.is_zero()), default=0)
        return {
            "left": [deg(self.column(i)) for i in range(self.rank)],
            "right": [deg(self.row(i)) for i in range(self.rank)],
            "denominators": [int(t.degree) for t in self.denominators],
        }

    def reconstructs(self, M: PolyMatrix) -> bool:
        """Exact check that the factorization reproduces ``M``.

        Walks the chain ``N_k = (p_k N_{k-1} - u_k (x) v_k) / p_{k-1}`` which
        encodes ``M - sum_{i<=k} u_i (x) v_i / t_i = N_k / p_k``; the identity
        holds iff every division is exact and ``N_r = 0``. Falls back to a
        common-denominator comparison when the denominators are not a pivot chain.
        """
        M = M.to_basis(STANDARD)
        if self.rank == 0:
            return M.is_zero()
        pivots = self.pivots or self._recover_pivots()
        if pivots is None:
            return self._reconstructs_by_common_denominator(M)
        N = M
        prev = Polynomial.constant(M.nvars, 1, STANDARD, M.field)
        for k, pk in enumerate(pivots):
            if self.denominators[k] != prev * pk:
                return self._reconstructs_by_common_denominator(M)
            uv = PolyMatrix.outer(self.column(k), self.row(k))
            try:
                N = (N.map(lambda p: p * pk) - uv).map(lambda p: p.exact_div(prev))
            except PolynomialError:
                return False
            prev = pk
        return N.is_zero()

    def _recover_pivots(self):
        prev = Polynomial.constant(self.left.nvars, 1, STANDARD, self.left.field)
        out = []
        for t in self.denominators:
            try:
                p = t.exact_div(prev)
            except PolynomialError:
                return None
            out.append(p)
            prev = p
        return tuple(out)

    def _reconstructs_by_common_denominator(self, M: PolyMatrix) -> bool:
        D = Polynomial.constant(M.nvars, 1, STANDARD, M.field)
        for t in self.denominators:
            D = D * t
        total = M.map(lambda p: p * D)
        for k, t in enumerate(self.denominators):
            w = D.exact_div(t)
            total = total - PolyMatrix.outer([p * w for p in self.column(k)], self.row(k))
        return total.is_zero()


def rank_factorize(M: PolyMatrix) -> RankFactorization:
    """Rank factorization over the function field from fraction-free elimination."""
    Ms = M.to_basis(STANDARD)
    steps = _bareiss(Ms)
    z = Polynomial.zero(Ms.nvars, STANDARD, Ms.field)
    left = [[z] * len(steps) for _ in range(Ms.rows)]
    right = [[z] * Ms.cols for _ in range(len(steps))]
    denoms = []
    prev = Polynomial.constant(Ms.nvars, 1, STANDARD, Ms.field)
    for k, st in enumerate(steps):
        for i, p in st.left.items():
            left[i][k] = p
        for j, p in st.right.items():
            right[k][j] = p
        denoms.append(prev * st.pivot)
        prev = st.pivot
    F = RankFactorization(
        PolyMatrix(left, Ms.nvars, STANDARD, Ms.field),
        PolyMatrix(right, Ms.nvars, STANDARD, Ms.field),
        tuple(denoms),
        tuple(st.pivot for st in steps),
        tuple((st.row, st.col) for st in steps),
    )
    if not F.reconstructs(Ms):
        raise AssertionError("rank factorization failed to reconstruct its input")
    return F


# ---------------------------------------------------------------------------
# matrix spaces


@dataclass(frozen=True)
class MatrixSpace:
    """Span of constant matrices; the reduced basis is computed once, lazily."""

    ambient_rows: int
    ambient_cols: int
    generators: tuple[ConstMatrix, ...]
    field: Field = QQ
    _cache: dict = dc_field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = dc_field(default_factory=threading.Lock, compare=False, repr=False)

    def __post_init__(self):
        gens = tuple(linalg.as_matrix(g, self.field) for g in self.generators)
        for g in gens:
            if linalg.shape(g) != (self.ambient_rows, self.ambient_cols):
                raise DimensionError(
                    f"generator of shape {linalg.shape(g)} in a {self.ambient_rows}x{self.ambient_cols} space")
        object.__setattr__(self, "generators", gens)

    def _echelon(self) -> Echelon:
        ech = self._cache.get("echelon")
        if ech is None:
            with self._lock:
                ech = self._cache.get("echelon")
                if ech is None:
                    ech = Echelon(self.ambient_rows * self.ambient_cols, self.field)
                    basis = []
                    for g in self.generators:
                        if ech.add(linalg.vectorize(g)):
                            basis.append(g)
                    self._cache["basis"] = tuple(basis)
                    self._cache["echelon"] = ech
        return ech

    def __reduce__(self):
        # the lock and cache are per-process
        return (MatrixSpace, (self.ambient_rows, self.ambient_cols, self.generators, self.field))

    @property
    def basis(self) -> tuple[ConstMatrix, ...]:
        """A linearly independent subset of the generators spanning the space."""
        self._echelon()
        return self._cache["basis"]

    @property
    def dim(self) -> int:
        return self._echelon().rank

    def contains(self, A: Sequence[Sequence]) -> bool:
        A = linalg.as_matrix(A, self.field)
        if linalg.shape(A) != (self.ambient_rows, self.ambient_cols) and not (
            self.ambient_rows == 0 or self.ambient_cols == 0
        ):
            raise DimensionError(f"matrix of shape {linalg.shape(A)} tested against a "
                                 f"{self.ambient_rows}x{self.ambient_cols} space")
        return self._echelon().contains(linalg.vectorize(A))

    def symbolic_combination(self) -> PolyMatrix:
        """``sum_i y_i B_i`` over the reduced basis ``B_i``."""
        basis = self.basis
        ys = [Polynomial.var(len(basis), i, STANDARD, self.field) for i in range(len(basis))]
        return PolyMatrix.linear_combination(basis, ys)


def space_membership(S: MatrixSpace, A: Sequence[Sequence]) -> bool:
    return S.contains(A)


def max_rank_of_space(S: MatrixSpace, seed: int | str | None = 0, trials: int = 3,
                      sample_range: int | None = None) -> int:
    """Maximum rank over the span, as the symbolic rank of a generic combination."""
    if S.dim == 0:
        return 0
    return randomized_symbolic_rank(S.symbolic_combination(), sample_range, trials, seed)


def coefficient_space(M: PolyMatrix) -> MatrixSpace:
    """Span of the constant matrices ``M_e`` with ``M = sum_e M_e x^e`` (divided basis)."""
    Md = M.to_basis(DIVIDED)
    exps = sorted({e for _, _, p in Md.cells() for e in p.terms}, key=grlex_key, reverse=True)
    gens = []
    for e in exps:
        gens.append(tuple(tuple(p.terms.get(e, 0) for p in row) for row in Md.entries))
    return MatrixSpace(M.rows, M.cols, tuple(gens), M.field)


def tensor_product_space(U: Sequence[Sequence], V: Sequence[Sequence], field: Field = QQ) -> MatrixSpace:
    """``span(U (x) V)`` from spanning vectors of ``U`` and ``V``."""
    gens = tuple(linalg.outer(u, v) for u in U for v in V)
    m = len(U[0]) if U else 0
    k = len(V[0]) if V else 0
    return MatrixSpace(m, k, gens, field)
