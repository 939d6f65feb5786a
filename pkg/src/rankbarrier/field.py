"""Exact scalar fields: rationals and large prime fields.

Rational elements are plain ``int`` when integral and ``Fraction`` otherwise, so
inner loops mostly run on machine-friendly ints. Prime-field elements are
:class:`GFElement` instances. In both cases ``+``, ``-``, ``*`` and ``==`` work
with operators; division always goes through :meth:`Field.div` because ``int / int``
would silently produce a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

MIN_PRIME = 2**31 - 1


class FieldError(ValueError):
    """Raised for illegal field choices or incompatible scalars."""


def _is_probable_prime(p: int) -> bool:
    if p < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


class GFElement:
    """Element of GF(p). Immutable."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "v", v % p)

    def __setattr__(self, name, value):
        raise AttributeError("GFElement is immutable")

    def _coerce(self, other) -> int:
        if isinstance(other, GFElement):
            if other.p != self.p:
                raise FieldError(f"mixing GF({self.p}) and GF({other.p})")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElement(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElement(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElement(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElement(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return GFElement(-self.v, self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in GF(p)")
        return GFElement(self.v * pow(o, -1, self.p), self.p)

    def __pow__(self, k: int):
        return GFElement(pow(self.v, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, GFElement):
            return self.p == other.p and self.v == other.v
        if isinstance(other, (int, Fraction)):
            return self.v == self._coerce(other) % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"GF({self.v} mod {self.p})"

    def __str__(self):
        return str(self.v)


Scalar = Union[int, Fraction, GFElement]


class Field:
    """Common interface for the scalar backends."""

    characteristic: int
    name: str

    def __call__(self, x: Any) -> Scalar:
        raise NotImplementedError

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        raise NotImplementedError

    def parse(self, s: str | int) -> Scalar:
        """Parse ``"p/q"`` or ``"p"`` (or an int) into a field element."""
        if isinstance(s, bool):
            raise FieldError(f"bad coefficient {s!r}")
        if isinstance(s, int):
            return self(s)
        if not isinstance(s, str):
            raise FieldError(f"coefficient must be a string or int, got {type(s).__name__}")
        try:
            return self(Fraction(s.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"bad coefficient {s!r}") from exc

    def format(self, a: Scalar) -> str:
        raise NotImplementedError

    def check_sample_range(self, sample_range: int) -> None:
        """Refuse sample ranges the field cannot host."""


class RationalField(Field):
    characteristic = 0
    name = "QQ"

    def __call__(self, x: Any) -> Scalar:
        if isinstance(x, GFElement):
            raise FieldError("cannot coerce a prime-field element to QQ")
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        if isinstance(x, int):
            return x
        return self(Fraction(x))

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in QQ")
        q = Fraction(a) / b
        return q.numerator if q.denominator == 1 else q

    def format(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


@dataclass(frozen=True, eq=True)
class PrimeField(Field):
    p: int

    def __post_init__(self):
        if self.p < MIN_PRIME:
            raise FieldError(f"prime field characteristic {self.p} is below the floor {MIN_PRIME}")
        if not _is_probable_prime(self.p):
            raise FieldError(f"{self.p} is not prime")

    @property
    def characteristic(self) -> int:  # type: ignore[override]
        return self.p

    @property
    def name(self) -> str:  # type: ignore[override]
        return f"GF({self.p})"

    def __call__(self, x: Any) -> GFElement:
        if isinstance(x, GFElement):
            if x.p != self.p:
                raise FieldError(f"mixing GF({x.p}) into GF({self.p})")
            return x
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError(f"{x} has no image in GF({self.p})")
            return GFElement(x.numerator * pow(x.denominator, -1, self.p), self.p)
        return GFElement(int(x), self.p)

    def div(self, a, b):
        return self(a) / b

    def format(self, a) -> str:
        return str(self(a).v)

    def check_sample_range(self, sample_range: int) -> None:
        if sample_range > self.p:
            raise FieldError(f"sample range {sample_range} exceeds field size {self.p}")

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


def field_from_spec(spec: str) -> Field:
    """Parse ``"rational"``/``"QQ"`` or ``"prime:P"``/``"prime(P)"``."""
    s = spec.strip().lower()
    if s in ("rational", "qq", "q"):
        return QQ
    for prefix in ("prime:", "prime(", "gf(", "gf:"):
        if s.startswith(prefix):
            body = s[len(prefix):].rstrip(")")
            try:
                p = int(body)
            except ValueError as exc:
                raise FieldError(f"bad field spec {spec!r}") from exc
            return PrimeField(p)
    raise FieldError(f"unknown field {spec!r}")


def require_randomized_safety(field: Field, max_degree: int, max_dim: int) -> None:
    """Schwartz-Zippel safety floor for randomized rank over a prime field."""
    if field.characteristic and field.characteristic < 100 * max(max_degree, 1) * max(max_dim, 1):
        raise FieldError(
            f"{field.name} is too small for randomized rank at degree {max_degree}, dimension {max_dim}"
        )
