"""Sparse exact multivariate polynomials in the standard or divided-power basis.

A polynomial stores a map ``exponent tuple -> coefficient``. In the divided basis
the monomial with exponent ``a`` stands for ``prod(x_i**a_i) / a!``; this makes
``d_a x^(a+b) = x^b`` hold on the nose and is the basis coefficient spaces and
linear maps on polynomials are read in.

Instances are treated as immutable values: nothing mutates ``terms`` after
construction.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .field import QQ, Field, Scalar

STANDARD = "standard"
DIVIDED = "divided"
BASES = (STANDARD, DIVIDED)

Monomial = tuple[int, ...]


class PolynomialError(ValueError):
    """Contract violation on polynomial operands."""


def factorial_vec(a: Monomial) -> int:
    out = 1
    for e in a:
        out *= math.factorial(e)
    return out


def multinomial_shift(a: Monomial, b: Monomial) -> int:
    """``C(a+b, a)`` taken coordinatewise; the divided-basis product correction."""
    out = 1
    for x, y in zip(a, b):
        if x and y:
            out *= math.comb(x + y, x)
    return out


def grlex_key(e: Monomial) -> tuple:
    return (sum(e), e)


def monomials_of_degree(n: int, d: int) -> list[Monomial]:
    """All exponent vectors of length ``n`` and total degree ``d``, grlex descending."""
    if n == 0:
        return [()] if d == 0 else []
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out


def monomials_up_to(n: int, d: int) -> list[Monomial]:
    """All exponent vectors of total degree ``<= d``, ascending by degree."""
    out: list[Monomial] = []
    for k in range(d + 1):
        out.extend(monomials_of_degree(n, k))
    return out


def _normalize(c, field: Field):
    # keep QQ coefficients as ints where possible; the fast path in every inner loop
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _packed_product(ta: Mapping, tb: Mapping, nvars: int, field: Field) -> dict:
    """Standard-basis product with exponents packed into one int per monomial.

    The radix exceeds every exponent of the result, so packed codes add without
    carries and decode uniquely.
    """
    if nvars == 0:
        c = ta[()] * tb[()]
        return {(): _normalize(c, field)} if c != 0 else {}
    radix = 1 + max(max(e) for e in ta) + max(max(e) for e in tb)
    weights = [radix**i for i in range(nvars)]

    def pack(terms):
        return [(sum(w * x for w, x in zip(weights, e)), c) for e, c in terms.items()]

    pa, pb = pack(ta), pack(tb)
    if len(pa) < len(pb):
        pa, pb = pb, pa
    acc: dict[int, Scalar] = {}
    get = acc.get
    for ka, ca in pa:
        for kb, cb in pb:
            k = ka + kb
            acc[k] = get(k, 0) + ca * cb
    out = {}
    for k, c in acc.items():
        if c != 0:
            e = []
            for _ in range(nvars):
                k, r = divmod(k, radix)
                e.append(r)
            out[tuple(e)] = _normalize(c, field)
    return out


class Polynomial:
    """Sparse polynomial in ``nvars`` variables over ``field``."""

    __slots__ = ("nvars", "terms", "basis", "field", "_hash")

    def __init__(
        self,
        nvars: int,
        terms: Mapping[Monomial, Scalar] | None = None,
        basis: str = STANDARD,
        field: Field = QQ,
        *,
        _trusted: bool = False,
    ):
        if basis not in BASES:
            raise PolynomialError(f"unknown basis {basis!r}")
        self.nvars = nvars
        self.basis = basis
        self.field = field
        self._hash = None
        if _trusted:
            self.terms = terms if terms is not None else {}
            return
        clean: dict[Monomial, Scalar] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise PolynomialError(f"exponent {e} has length {len(e)}, expected {nvars}")
            if any(x < 0 for x in e):
                raise PolynomialError(f"negative exponent in {e}")
            c = field(c)
            if c != 0:
                clean[e] = _normalize(clean.get(e, 0) + c, field) if e in clean else c
                if clean[e] == 0:
                    del clean[e]
        self.terms = clean

    # ----- constructors -------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, basis: str = STANDARD, field: Field = QQ) -> Polynomial:
        return cls(nvars, {}, basis, field, _trusted=True)

    @classmethod
    def constant(cls, nvars: int, c, basis: str = STANDARD, field: Field = QQ) -> Polynomial:
        return cls(nvars, {(0,) * nvars: c}, basis, field)

    @classmethod
    def var(cls, nvars: int, i: int, basis: str = STANDARD, field: Field = QQ) -> Polynomial:
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1}, basis, field)

    @classmethod
    def monomial(cls, exp: Sequence[int], coef=1, basis: str = STANDARD, field: Field = QQ) -> Polynomial:
        return cls(len(exp), {tuple(exp): coef}, basis, field)

    def _new(self, terms: dict, basis: str | None = None) -> Polynomial:
        return Polynomial(self.nvars, terms, basis or self.basis, self.field, _trusted=True)

    def zero_like(self) -> Polynomial:
        return self._new({})

    def const_like(self, c) -> Polynomial:
        c = self.field(c)
        return self._new({(0,) * self.nvars: c} if c != 0 else {})

    # ----- inspection ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> float:
        """Total degree; ``-inf`` for the zero polynomial."""
        if not self.terms:
            return -math.inf
        return max(sum(e) for e in self.terms)

    def degrees(self) -> set[int]:
        return {sum(e) for e in self.terms}

    def is_homogeneous(self, d: int | None = None) -> bool:
        """Zero counts as homogeneous of every degree."""
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (d is None or d in ds)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * self.nvars, 0)

    def coeff(self, e: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(e), 0)

    def sorted_terms(self) -> list[tuple[Monomial, Scalar]]:
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise PolynomialError("zero polynomial has no leading monomial")
        return max(self.terms, key=grlex_key)

    def support_size(self) -> int:
        return len(self.terms)

    def variables_used(self) -> set[int]:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    # ----- arithmetic ---------------------------------------------------
    def _check(self, other: Polynomial) -> None:
        if not isinstance(other, Polynomial):
            raise PolynomialError(f"expected Polynomial, got {type(other).__name__}")
        if other.nvars != self.nvars:
            raise PolynomialError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        if other.basis != self.basis:
            raise PolynomialError(f"basis mismatch: {self.basis} vs {other.basis}")
        if other.field != self.field:
            raise PolynomialError(f"field mismatch: {self.field!r} vs {other.field!r}")

    def _lift(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return self.const_like(other)

    def __add__(self, other) -> Polynomial:
        other = self._lift(other)
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v == 0:
                    del out[e]
                else:
                    out[e] = _normalize(v, self.field)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Polynomial:
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = -c
            else:
                v = v - c
                if v == 0:
                    del out[e]
                else:
                    out[e] = _normalize(v, self.field)
        return self._new(out)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def scale(self, c) -> Polynomial:
        c = self.field(c)
        if c == 0:
            return self.zero_like()
        if c == 1:
            return self
        return self._new({e: _normalize(v * c, self.field) for e, v in self.terms.items()})

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        if not self.terms or not other.terms:
            return self.zero_like()
        field = self.field
        if self.basis == DIVIDED:
            out: dict[Monomial, Scalar] = {}
            get = out.get
            for ea, ca in self.terms.items():
                for eb, cb in other.terms.items():
                    e = tuple([x + y for x, y in zip(ea, eb)])
                    out[e] = get(e, 0) + ca * cb * multinomial_shift(ea, eb)
            return self._new({e: _normalize(c, field) for e, c in out.items() if c != 0})
        return self._new(_packed_product(self.terms, other.terms, self.nvars, field))

    def __rmul__(self, other) -> Polynomial:
        return self.scale(other)

    def __pow__(self, k: int) -> Polynomial:
        if k < 0:
            raise PolynomialError("negative power")
        result = self.const_like(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return (
                self.nvars == other.nvars
                and self.basis == other.basis
                and self.field == other.field
                and self.terms == other.terms
            )
        if isinstance(other, (int, Fraction)):
            return self == self.const_like(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, self.basis, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # ----- exact division -----------------------------------------------
    def exact_div(self, q: Polynomial) -> Polynomial:
        """Quotient ``self / q``; raises if ``q`` does not divide ``self``.

        Runs the grlex division algorithm with a heap of pending monomials.
        Standard basis only.
        """
        self._check(q)
        if self.basis != STANDARD:
            return self.to_basis(STANDARD).exact_div(q.to_basis(STANDARD)).to_basis(self.basis)
        if q.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return self.zero_like()
        field = self.field
        if len(q.terms) == 1:
            (lq, cq), = q.terms.items()
            out = {}
            for e, c in self.terms.items():
                m = tuple([x - y for x, y in zip(e, lq)])
                if min(m) < 0:
                    raise PolynomialError("inexact polynomial division")
                out[m] = field.div(c, cq)
            return self._new(out)
        lq = q.leading_monomial()
        cq = q.terms[lq]
        q_rest = [(e, c) for e, c in q.terms.items() if e != lq]
        rem = dict(self.terms)
        heap = [tuple(-x for x in grlex_key(e)[:1]) + tuple(-x for x in e) for e in rem]
        heapq.heapify(heap)
        quot: dict[Monomial, Scalar] = {}
        while heap:
            key = heapq.heappop(heap)
            e = tuple(-x for x in key[1:])
            c = rem.pop(e, None)
            if c is None or c == 0:
                continue
            while heap and heap[0] == key:
                heapq.heappop(heap)
            m = tuple([x - y for x, y in zip(e, lq)])
            if min(m) < 0:
                raise PolynomialError("inexact polynomial division")
            t = field.div(c, cq)
            quot[m] = t
            for eq_, cq_ in q_rest:
                f = tuple([x + y for x, y in zip(m, eq_)])
                v = rem.get(f)
                if v is None:
                    rem[f] = -t * cq_
                    heapq.heappush(heap, (-sum(f),) + tuple(-x for x in f))
                else:
                    v = v - t * cq_
                    rem[f] = v
        if any(c != 0 for c in rem.values()):
            raise PolynomialError("inexact polynomial division")
        return self._new({e: _normalize(c, field) for e, c in quot.items()})

    # ----- basis conversion ---------------------------------------------
    def to_basis(self, target: str) -> Polynomial:
        """Rewrite in ``target`` basis; coefficients scale by ``a!`` or ``1/a!``."""
        if target not in BASES:
            raise PolynomialError(f"unknown basis {target!r}")
        if target == self.basis:
            return self
        field = self.field
        if target == STANDARD:
            out = {e: field.div(c, factorial_vec(e)) for e, c in self.terms.items()}
        else:
            out = {e: _normalize(c * factorial_vec(e), field) for e, c in self.terms.items()}
        return self._new(out, target)

    # ----- components ---------------------------------------------------
    def homogeneous_component(self, t: int) -> Polynomial:
        if t < 0:
            raise PolynomialError("degree must be non-negative")
        return self._new({e: c for e, c in self.terms.items() if sum(e) == t})

    def truncate(self, t: int) -> Polynomial:
        """``H_{<=t}``: drop every monomial of degree above ``t``."""
        return self._new({e: c for e, c in self.terms.items() if sum(e) <= t})

    def homogeneous_components(self) -> dict[int, Polynomial]:
        return {t: self.homogeneous_component(t) for t in sorted(self.degrees())}

    def sm_component(self, part: VariablePartition, S: Iterable[int]) -> Polynomial:
        """Set-multilinear part for the block subset ``S`` (0-based block indices)."""
        part.check(self.nvars)
        S = part.check_subset(S)
        return self._new({e: c for e, c in self.terms.items() if part.monomial_signature(e) == S})

    def is_set_multilinear(self, part: VariablePartition, S: Iterable[int] | None = None) -> bool:
        """Homogeneous set-multilinear w.r.t. the blocks in ``S`` (all blocks if omitted)."""
        part.check(self.nvars)
        S = part.check_subset(range(part.d) if S is None else S)
        return all(part.monomial_signature(e) == S for e in self.terms)

    # ----- calculus and evaluation ------------------------------------------
    def derivative(self, a: Sequence[int]) -> Polynomial:
        """Iterated partial derivative ``d_a``; returned in this polynomial's basis."""
        a = tuple(a)
        if len(a) != self.nvars:
            raise PolynomialError(f"derivative multi-index has length {len(a)}, expected {self.nvars}")
        if self.basis == STANDARD:
            return self.to_basis(DIVIDED).derivative(a).to_basis(STANDARD)
        out = {}
        for e, c in self.terms.items():
            b = tuple([x - y for x, y in zip(e, a)])
            if min(b, default=0) >= 0:
                out[b] = c
        return self._new(out)

    def evaluate(self, point: Sequence) -> Scalar:
        if len(point) != self.nvars:
            raise PolynomialError(f"point has length {len(point)}, expected {self.nvars}")
        field = self.field
        pt = [field(x) for x in point]
        total = field(0)
        powers: list[dict[int, Scalar]] = [{} for _ in pt]
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k:
                    pw = powers[i].get(k)
                    if pw is None:
                        pw = pt[i] ** k
                        powers[i][k] = pw
                    v = v * pw
            if self.basis == DIVIDED:
                v = field.div(v, factorial_vec(e))
            total = total + v
        return field(_normalize(total, field))

    def shift(self, a: Sequence, max_degree: int | None = None) -> Polynomial:
        """Substitute ``x -> x + a``, optionally keeping only degrees ``<= max_degree``."""
        if self.basis != STANDARD:
            return self.to_basis(STANDARD).shift(a, max_degree).to_basis(self.basis)
        field = self.field
        a = [field(x) for x in a]
        if len(a) != self.nvars:
            raise PolynomialError(f"shift vector has length {len(a)}, expected {self.nvars}")
        out: dict[Monomial, Scalar] = {}
        # per-variable expansions (x_i + a_i)^k = sum_j C(k, j) a_i^(k-j) x_i^j
        cache: dict[tuple[int, int], list[tuple[int, Scalar]]] = {}

        def expansion(i: int, k: int):
            key = (i, k)
            if key not in cache:
                cache[key] = [
                    (j, math.comb(k, j) * a[i] ** (k - j))
                    for j in range(k + 1)
                    if a[i] != 0 or j == k
                ]
            return cache[key]

        for e, c in self.terms.items():
            partial: list[tuple[list[int], Scalar, int]] = [([], c, 0)]
            for i, k in enumerate(e):
                nxt = []
                for exps, coef, deg in partial:
                    for j, w in expansion(i, k):
                        if max_degree is not None and deg + j > max_degree:
                            continue
                        nxt.append((exps + [j], coef * w, deg + j))
                partial = nxt
            for exps, coef, _ in partial:
                m = tuple(exps)
                out[m] = out.get(m, 0) + coef
        return self._new({e: _normalize(c, field) for e, c in out.items() if c != 0})

    def rename(self, nvars: int, mapping: Sequence[int]) -> Polynomial:
        """Embed into ``nvars`` variables, sending old variable ``i`` to ``mapping[i]``."""
        out = {}
        for e, c in self.terms.items():
            new = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    new[mapping[i]] += k
            out[tuple(new)] = c
        return Polynomial(nvars, out, self.basis, self.field)

    def with_field(self, field: Field) -> Polynomial:
        return Polynomial(self.nvars, {e: field(c) for e, c in self.terms.items()}, self.basis, field)

    # ----- display ------------------------------------------------------
    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if self.basis == DIVIDED and mono:
                mono = f"[{mono}]"
            cs = self.field.format(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        tag = "" if self.basis == STANDARD else ", divided"
        return f"Polynomial({self.to_str()}{tag})"


@dataclass(frozen=True)
class VariablePartition:
    """Ordered disjoint blocks of variable indices covering ``range(num_vars)``."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen: set[int] = set()
        for b in blocks:
            for i in b:
                if i in seen:
                    raise PolynomialError(f"variable {i} appears in two blocks")
                seen.add(i)
        if seen != set(range(len(seen))):
            raise PolynomialError("blocks must cover 0..num_vars-1 exactly")
        lookup = {}
        for j, b in enumerate(blocks):
            for i in b:
                lookup[i] = j
        object.__setattr__(self, "_block_of", lookup)

    @classmethod
    def uniform(cls, d: int, n: int) -> VariablePartition:
        """``d`` consecutive blocks of ``n`` variables each."""
        return cls(tuple(tuple(range(j * n, (j + 1) * n)) for j in range(d)))

    @property
    def d(self) -> int:
        return len(self.blocks)

    @property
    def num_vars(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block_of(self, var: int) -> int:
        return self._block_of[var]  # type: ignore[attr-defined]

    def check(self, nvars: int) -> None:
        if nvars != self.num_vars:
            raise PolynomialError(f"partition covers {self.num_vars} variables, polynomial has {nvars}")

    def check_subset(self, S: Iterable[int]) -> frozenset[int]:
        S = frozenset(S)
        bad = [j for j in S if not 0 <= j < self.d]
        if bad:
            raise PolynomialError(f"block indices {sorted(bad)} out of range for {self.d} blocks")
        return S

    def monomial_signature(self, e: Monomial) -> frozenset[int] | None:
        """Set of blocks used if ``e`` is set-multilinear (one variable per block), else None."""
        used = set()
        for i, k in enumerate(e):
            if k:
                if k > 1:
                    return None
                j = self._block_of[i]  # type: ignore[attr-defined]
                if j in used:
                    return None
                used.add(j)
        return frozenset(used)

    def subsets(self) -> Iterator[frozenset[int]]:
        for k in range(self.d + 1):
            for S in itertools.combinations(range(self.d), k):
                yield frozenset(S)


PolyVector = tuple[Polynomial, ...]


def check_poly_vector(v: Sequence[Polynomial]) -> PolyVector:
    v = tuple(v)
    if v:
        first = v[0]
        for p in v[1:]:
            first._check(p)
    return v


def poly_ring(nvars: int, basis: str = STANDARD, field: Field = QQ) -> list[Polynomial]:
    """Generators ``x_1..x_n`` as polynomials, for building expressions in tests and scripts."""
    return [Polynomial.var(nvars, i, basis, field) for i in range(nvars)]
