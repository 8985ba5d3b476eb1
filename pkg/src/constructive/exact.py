"""Exact rationals and closed rational intervals.

Rationals are plain :class:`fractions.Fraction` values, which are always kept
in lowest terms with a positive denominator.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DivisionByZero, ParseError

Rational = Fraction

_RATIONAL_RE = re.compile(r"\s*(-?\d+)(?:\s*/\s*(\d+))?\s*\Z")


def rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction (no floats)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot make an exact rational from {type(value).__name__}")


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ParseError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def pow2(n: int) -> Fraction:
    """Exact 2**n for any integer n."""
    return Fraction(1 << n) if n >= 0 else Fraction(1, 1 << -n)


def ceil_log2(q) -> int:
    """Smallest integer e with 2**e >= q, for q > 0."""
    q = rat(q)
    if q <= 0:
        raise ValueError("ceil_log2 needs a positive argument")
    e = q.numerator.bit_length() - q.denominator.bit_length()
    while pow2(e) < q:
        e += 1
    while pow2(e - 1) >= q:
        e -= 1
    return e


def min_precision_below(bound) -> int:
    """Smallest n >= 0 with 2**-n < bound (bound > 0)."""
    bound = rat(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    n = max(0, -ceil_log2(bound))
    while pow2(-n) >= bound:
        n += 1
    return n


def min_precision_at_most(bound) -> int:
    """Smallest n >= 0 with 2**-n <= bound (bound > 0)."""
    bound = rat(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    return max(0, -ceil_log2(bound) + (0 if pow2(ceil_log2(bound)) == bound else 1))


def cmp(x, y) -> int:
    x, y = rat(x), rat(y)
    return (x > y) - (x < y)


def rat_arith(op: str, x, y=None):
    """Dispatch a named rational operation; unary ops ignore ``y``.

    ``cmp`` returns -1, 0 or 1.  Division by zero raises :class:`DivisionByZero`.
    """
    x = rat(x)
    if op == "neg":
        return -x
    if op == "abs":
        return abs(x)
    y = rat(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if y == 0:
            raise DivisionByZero(f"{format_rational(x)} / 0")
        return x / y
    if op == "min":
        return min(x, y)
    if op == "max":
        return max(x, y)
    if op == "cmp":
        return cmp(x, y)
    raise ValueError(f"unknown rational operation {op!r}")


class _EmptyType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Empty"

    def __bool__(self):
        return False


Empty = _EmptyType()


@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", rat(self.lo))
        object.__setattr__(self, "hi", rat(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, q) -> RatInterval:
        return cls(q, q)

    @classmethod
    def around(cls, center, radius) -> RatInterval:
        center, radius = rat(center), rat(radius)
        return cls(center - radius, center + radius)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def magnitude(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def halves(self) -> tuple[RatInterval, RatInterval]:
        m = self.midpoint
        return RatInterval(self.lo, m), RatInterval(m, self.hi)

    def contains(self, other) -> bool:
        if isinstance(other, RatInterval):
            return self.lo <= other.lo and other.hi <= self.hi
        q = rat(other)
        return self.lo <= q <= self.hi

    __contains__ = contains

    def hull(self, other) -> RatInterval:
        other = _as_interval(other)
        return RatInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other):
        """Intersection, or the :data:`Empty` marker when disjoint."""
        other = _as_interval(other)
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return Empty
        return RatInterval(lo, hi)

    def __add__(self, other):
        other = _as_interval(other)
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_interval(other)
        return RatInterval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RatInterval(min(products), max(products))

    __rmul__ = __mul__

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RatInterval(Fraction(0), max(-self.lo, self.hi))

    def min(self, other) -> RatInterval:
        other = _as_interval(other)
        return RatInterval(min(self.lo, other.lo), min(self.hi, other.hi))

    def max(self, other) -> RatInterval:
        other = _as_interval(other)
        return RatInterval(max(self.lo, other.lo), max(self.hi, other.hi))

    def __str__(self):
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


def _as_interval(value) -> RatInterval:
    if isinstance(value, RatInterval):
        return value
    return RatInterval.point(rat(value))


IntervalOperand = Union[RatInterval, Fraction, int]


def interval_ops(op: str, I: RatInterval, J: IntervalOperand | None = None):
    """Named interval operation; mirrors :func:`rat_arith` for intervals."""
    if op == "width":
        return I.width
    if op == "midpoint":
        return I.midpoint
    if op == "neg":
        return -I
    if op == "abs":
        return abs(I)
    if J is None:
        raise ValueError(f"{op} needs a second operand")
    table = {
        "hull": I.hull,
        "intersect": I.intersect,
        "contains": I.contains,
        "add": I.__add__,
        "sub": I.__sub__,
        "mul": I.__mul__,
        "min": I.min,
        "max": I.max,
    }
    try:
        return table[op](J)
    except KeyError:
        raise ValueError(f"unknown interval operation {op!r}") from None
