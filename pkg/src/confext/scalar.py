"""Exact scalars: rationals and elements of a real quadratic field Q(sqrt d).

Rational values are plain :class:`fractions.Fraction` objects.  A value with a
nonzero irrational part is a :class:`Scalar`.  Arithmetic between the two
mixes freely; arithmetic that ends up with a zero irrational part collapses
back to a ``Fraction`` so that the pure-rational path stays cheap.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from numbers import Rational


class FieldMismatchError(ValueError):
    """Raised when two quadratic values with different discriminants meet."""


def is_squarefree(d: int) -> bool:
    if d < 2:
        return d == 1
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def make(a, b=0, d: int = 0):
    """Return the canonical field element ``a + b*sqrt(d)``."""
    a = _frac(a)
    b = _frac(b)
    if b == 0 or d == 0:
        if d == 0 and b != 0:
            raise ValueError("d=0 forces b=0")
        return a
    if d < 0 or not is_squarefree(d):
        raise ValueError(f"discriminant must be a positive squarefree integer, got {d}")
    if d == 1:
        return a + b
    return Scalar(a, b, d)


def sqrt(d: int):
    """The element sqrt(d) of Q(sqrt d)."""
    return make(0, 1, d)


@total_ordering
class Scalar:
    """``a + b*sqrt(d)`` with ``b != 0``; instances are immutable."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Fraction, b: Fraction, d: int):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __reduce__(self):
        return (Scalar, (self.a, self.b, self.d))

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.d != self.d:
                raise FieldMismatchError(
                    f"cannot combine elements of Q(sqrt {self.d}) and Q(sqrt {other.d})"
                )
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return make(self.a + o[0], self.b + o[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return make(self.a - o[0], self.b - o[1], self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return make(o[0] - self.a, o[1] - self.b, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        c, e = o
        return make(self.a * c + self.b * e * self.d, self.a * e + self.b * c, self.d)

    __rmul__ = __mul__

    def conjugate(self):
        return Scalar(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self):
        n = self.norm()
        # n != 0 because sqrt(d) is irrational and b != 0
        return make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o[1] == 0:
            if o[0] == 0:
                raise ZeroDivisionError("division by zero scalar")
            return make(self.a / o[0], self.b / o[0], self.d)
        return self * Scalar(o[0], o[1], self.d).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return make(o[0], o[1], self.d) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Fraction(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return False  # b != 0 by construction
        return NotImplemented

    def __hash__(self):
        return hash(("Scalar", self.a, self.b, self.d))

    def __bool__(self):
        return True

    def __float__(self):
        return float(self.a) + float(self.b) * self.d ** 0.5

    def __lt__(self, other):
        # real ordering via the embedding sqrt(d) > 0
        diff = self - other
        if isinstance(diff, Fraction):
            return diff < 0
        a, b = diff.a, diff.b
        # sign of a + b*sqrt(d)
        if a >= 0 and b >= 0:
            return False
        if a <= 0 and b <= 0:
            return True
        if a > 0:  # b < 0
            return a * a < b * b * diff.d
        return a * a > b * b * diff.d

    def __repr__(self):
        return f"Scalar({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return render_scalar(self)


def components(x) -> tuple[Fraction, Fraction, int]:
    """``(a, b, d)`` for any field element."""
    if isinstance(x, Scalar):
        return x.a, x.b, x.d
    return _frac(x), Fraction(0), 0


def discriminant(x) -> int:
    return x.d if isinstance(x, Scalar) else 0


def common_discriminant(values) -> int:
    """The discriminant shared by all values (0 if all rational)."""
    d = 0
    for v in values:
        e = discriminant(v)
        if e:
            if d and e != d:
                raise FieldMismatchError(f"mixed discriminants {d} and {e}")
            d = e
    return d


def scalar_arith(x, y, op: str):
    """Exact field arithmetic, ``op`` in {add, sub, mul, div}."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if y == 0:
            raise ZeroDivisionError("division by zero scalar")
        return x / y
    raise ValueError(f"unknown scalar operation {op!r}")


def sign(x) -> int:
    if x == 0:
        return 0
    return -1 if x < 0 else 1


def _render_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def render_scalar(x, sqrt_symbol: str = "√") -> str:
    """Canonical text: ``3/2``, ``-7``, ``7/2+1/2√19``, ``0-1√19``."""
    a, b, d = components(x)
    if b == 0:
        return _render_rational(a)
    op = "+" if b > 0 else "-"
    return f"{_render_rational(a)}{op}{_render_rational(abs(b))}{sqrt_symbol}{d}"


_RAT = r"\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?P<sa>[+-]?)\s*(?P<a>{_RAT})"
    rf"(?:\s*(?P<sb>[+-])\s*(?P<b>{_RAT})?\s*(?:√|r)\s*(?P<d>\d+))?\s*$"
)


def parse_scalar(text: str):
    """Parse ``int[/int][(+|-)[int[/int]](√|r)int]``; ``r`` is an ASCII alias for √."""
    m = _SCALAR_RE.match(text)
    if not m:
        raise ValueError(f"malformed scalar literal {text!r}")
    a = Fraction(m["a"])
    if m["sa"] == "-":
        a = -a
    if m["d"] is None:
        return a
    b = Fraction(m["b"]) if m["b"] else Fraction(1)
    if m["sb"] == "-":
        b = -b
    return make(a, b, int(m["d"]))


def to_field(x):
    """Coerce int/str/Fraction/Scalar to a canonical field element."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    return _frac(x)


class Field:
    """The active coefficient field: ℚ (``d = 0``) or ℚ(√d)."""

    __slots__ = ("d",)

    def __init__(self, d: int = 0):
        if d and (d < 2 or not is_squarefree(d)):
            raise ValueError(f"q-sqrt needs a squarefree integer greater than 1, got {d}")
        self.d = d

    @classmethod
    def parse(cls, text: str) -> Field:
        text = text.strip()
        if text == "q":
            return cls(0)
        m = re.fullmatch(r"q-sqrt:(\d+)", text)
        if not m:
            raise ValueError(f"field must be 'q' or 'q-sqrt:<d>', got {text!r}")
        return cls(int(m.group(1)))

    def contains(self, x) -> bool:
        e = discriminant(x)
        return e == 0 or e == self.d

    def __eq__(self, other):
        return isinstance(other, Field) and other.d == self.d

    def __hash__(self):
        return hash(("Field", self.d))

    def __str__(self):
        return "q" if not self.d else f"q-sqrt:{self.d}"

    __repr__ = __str__
