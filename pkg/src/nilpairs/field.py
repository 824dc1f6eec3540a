"""Exact scalar fields: the rationals and prime fields GF(p).

A field object does arithmetic on *raw* element values (``gmpy2.mpq`` for Q,
``int`` in ``[0, p)`` for GF(p)).  Matrices and short forms hold raw values
together with their field, which keeps the inner loops cheap.  :class:`Scalar`
is the user-facing wrapper that carries its field and refuses to mix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Iterator

import gmpy2
from gmpy2 import mpq


class FieldError(ValueError):
    """Malformed field designator or scalar text."""


class FieldMismatchError(TypeError):
    """Arithmetic between scalars of different fields."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


_INT_RE = re.compile(r"^\s*([+-]?\d+)\s*$")
_FRAC_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")


class Field:
    """Base class for the two supported field kinds."""

    kind: str
    modulus: int | None = None
    zero: Any
    one: Any

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Field)
            and self.kind == other.kind
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.modulus))

    def __call__(self, value: Any) -> Any:
        """Coerce an int, string or raw value into a raw element."""
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldMismatchError(f"{value.field} element used in {self}")
            return value.value
        if isinstance(value, str):
            return self.parse(value)
        return self.coerce(value)

    def scalar(self, value: Any) -> Scalar:
        return Scalar(self, self(value))

    # arithmetic on raw values
    def neg(self, x):
        raise NotImplementedError

    def add(self, x, y):
        raise NotImplementedError

    def sub(self, x, y):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def coerce(self, value: Any):
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def sort_key(self, x):
        """Total order on raw values; used for deterministic reports."""
        return x


class RationalField(Field):
    kind = "Q"

    def __init__(self) -> None:
        self.zero = mpq(0)
        self.one = mpq(1)

    def __repr__(self) -> str:
        return "Q"

    def neg(self, x):
        return -x

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("division by zero in Q")
        return 1 / x

    def div(self, x, y):
        if not y:
            raise ZeroDivisionError("division by zero in Q")
        return x / y

    def coerce(self, value: Any):
        if isinstance(value, float):
            raise FieldError("floating point values are not exact field elements")
        return mpq(value)

    def parse(self, text: str):
        m = _INT_RE.match(text)
        if m:
            return mpq(int(m.group(1)))
        m = _FRAC_RE.match(text)
        if m:
            den = int(m.group(2))
            if den == 0:
                raise FieldError(f"zero denominator in {text!r}")
            return mpq(int(m.group(1)), den)
        raise FieldError(f"not a rational number: {text!r}")

    def format(self, x) -> str:
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def random(self, rng, bound: int = 9, den_bound: int = 1):
        num = rng.randint(-bound, bound)
        den = rng.randint(1, den_bound) if den_bound > 1 else 1
        return mpq(num, den)


class PrimeField(Field):
    kind = "GF"

    def __init__(self, p: int) -> None:
        p = int(p)
        if not is_prime(p):
            raise FieldError(f"modulus {p} is not prime")
        self.modulus = p
        self.zero = 0
        self.one = 1 % p

    def __repr__(self) -> str:
        return f"GF({self.modulus})"

    def neg(self, x):
        return -x % self.modulus

    def add(self, x, y):
        return (x + y) % self.modulus

    def sub(self, x, y):
        return (x - y) % self.modulus

    def mul(self, x, y):
        return x * y % self.modulus

    def inv(self, x):
        if x % self.modulus == 0:
            raise ZeroDivisionError(f"division by zero in {self}")
        return pow(x, -1, self.modulus)

    def coerce(self, value: Any):
        if isinstance(value, float):
            raise FieldError("floating point values are not exact field elements")
        if isinstance(value, (int, type(gmpy2.mpz(0)))):
            return int(value) % self.modulus
        q = mpq(value)
        return int(q.numerator) * self.inv(int(q.denominator) % self.modulus) % self.modulus

    def parse(self, text: str):
        m = _INT_RE.match(text)
        if not m:
            raise FieldError(f"not an element of {self}: {text!r}")
        return int(m.group(1)) % self.modulus

    def format(self, x) -> str:
        return str(x)

    def elements(self) -> Iterator[int]:
        return iter(range(self.modulus))

    def random(self, rng, *_, **__):
        return rng.randrange(self.modulus)


Q = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


_GF_RE = re.compile(r"^\s*GF\s*\(\s*(\d+)\s*\)\s*$")


def parse_field(designator: str) -> Field:
    """Parse ``"Q"`` or ``"GF(p)"``."""
    if designator.strip() == "Q":
        return Q
    m = _GF_RE.match(designator)
    if m:
        return PrimeField(int(m.group(1)))
    raise FieldError(f"unknown field designator {designator!r}")


@dataclass(frozen=True)
class Scalar:
    """An element of a specific field."""

    field: Field
    value: Any

    def _check(self, other: Any) -> Any:
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field.coerce(other)
        return NotImplemented

    def __add__(self, other):
        y = self._check(other)
        return y if y is NotImplemented else Scalar(self.field, self.field.add(self.value, y))

    __radd__ = __add__

    def __sub__(self, other):
        y = self._check(other)
        return y if y is NotImplemented else Scalar(self.field, self.field.sub(self.value, y))

    def __rsub__(self, other):
        y = self._check(other)
        return y if y is NotImplemented else Scalar(self.field, self.field.sub(y, self.value))

    def __mul__(self, other):
        y = self._check(other)
        return y if y is NotImplemented else Scalar(self.field, self.field.mul(self.value, y))

    __rmul__ = __mul__

    def __truediv__(self, other):
        y = self._check(other)
        return y if y is NotImplemented else Scalar(self.field, self.field.div(self.value, y))

    def __rtruediv__(self, other):
        y = self._check(other)
        return y if y is NotImplemented else Scalar(self.field, self.field.div(y, self.value))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def __pow__(self, k: int):
        if k < 0:
            return (1 / self) ** (-k)
        result = Scalar(self.field, self.field.one)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __bool__(self) -> bool:
        return bool(self.value)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.coerce(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.value))

    def __str__(self) -> str:
        return self.field.format(self.value)

    def __repr__(self) -> str:
        return f"Scalar({self.field!r}, {self})"


def scalar_parse(text: str, field: Field) -> Scalar:
    return Scalar(field, field.parse(text))


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if a.field != b.field:
        raise FieldMismatchError(f"cannot combine {a.field} and {b.field}")
    ops = {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}
    try:
        return ops[op](b)
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
