"""Computable reals as precision-indexed rational approximation oracles.

A :class:`CReal` answers ``approx(n)`` with a rational within ``2**-n`` of the
real it denotes.  Comparison is only semidecidable; :func:`apart` searches for
a certified gap under an explicit :class:`Fuel` budget, and :func:`locate`
gives the total cotransitivity decision.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Generic, Iterable, TypeVar, Union

from .errors import BadStraddle, NestingViolation
from .exact import RatInterval, ceil_log2, format_rational, min_precision_below, pow2, rat

W = TypeVar("W")


class Fuel:
    """A decrementing step budget.

    A slice is a child budget whose spending also counts against its parent,
    so nested searches share one total.
    """

    def __init__(self, budget: int, parent: "Fuel | None" = None):
        if budget < 0:
            raise ValueError("fuel budget must be >= 0")
        self.budget = budget
        self.spent = 0
        self.parent = parent

    @classmethod
    def of(cls, fuel: Union["Fuel", int]) -> "Fuel":
        return fuel if isinstance(fuel, Fuel) else cls(fuel)

    @property
    def remaining(self) -> int:
        own = self.budget - self.spent
        return own if self.parent is None else min(own, self.parent.remaining)

    def take(self, units: int = 1) -> bool:
        """Spend ``units`` if available; False (and nothing spent) otherwise."""
        if self.remaining < units:
            return False
        if self.parent is not None:
            self.parent.take(units)
        self.spent += units
        return True

    def slice(self, size: int) -> "Fuel":
        return Fuel(size, parent=self)

    def __repr__(self):
        return f"Fuel({self.spent}/{self.budget})"


@dataclass(frozen=True)
class Found(Generic[W]):
    witness: W
    fuel_spent: int = 0

    found = True


@dataclass(frozen=True)
class Exhausted:
    """Not found within budget.  Carries no truth claim."""

    fuel_spent: int

    found = False


SearchOutcome = Union[Found, Exhausted]


class CReal:
    """A computable real given by its approximation function.

    ``approx(n)`` must return a rational within ``2**-n`` of the denoted real
    and must be deterministic.  Results are memoized per instance.
    """

    __slots__ = ("_fn", "provenance", "exact", "_cache", "_lock")

    def __init__(self, fn: Callable[[int], Fraction], provenance: str = "opaque", exact: Fraction | None = None):
        self._fn = fn
        self.provenance = provenance
        # set only when every approximation equals this rational
        self.exact = exact
        self._cache: dict[int, Fraction] = {}
        self._lock = threading.Lock()

    def approx(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError("precision index must be >= 0")
        with self._lock:
            hit = self._cache.get(n)
        if hit is not None:
            return hit
        value = rat(self._fn(n))
        with self._lock:
            return self._cache.setdefault(n, value)

    def enclosure(self, n: int) -> RatInterval:
        if self.exact is not None:
            return RatInterval.point(self.exact)
        a = self.approx(n)
        e = pow2(-n)
        return RatInterval(a - e, a + e)

    def __add__(self, other):
        return add(self, _as_creal(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _as_creal(other))

    def __rsub__(self, other):
        return sub(_as_creal(other), self)

    def __mul__(self, other):
        return mul(self, _as_creal(other))

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __abs__(self):
        return cabs(self)

    def __repr__(self):
        return f"CReal<{self.provenance}>"


def _as_creal(value) -> CReal:
    return value if isinstance(value, CReal) else embed(value)


def embed(q) -> CReal:
    q = rat(q)
    return CReal(lambda n: q, provenance=f"rational {format_rational(q)}", exact=q)


def add(x: CReal, y: CReal) -> CReal:
    if x.exact is not None and y.exact is not None:
        return embed(x.exact + y.exact)
    return CReal(lambda n: x.approx(n + 1) + y.approx(n + 1), f"add({x.provenance}, {y.provenance})")


def neg(x: CReal) -> CReal:
    if x.exact is not None:
        return embed(-x.exact)
    return CReal(lambda n: -x.approx(n), f"neg({x.provenance})")


def sub(x: CReal, y: CReal) -> CReal:
    return add(x, neg(y))


def cmin(x: CReal, y: CReal) -> CReal:
    if x.exact is not None and y.exact is not None:
        return embed(min(x.exact, y.exact))
    return CReal(lambda n: min(x.approx(n), y.approx(n)), f"min({x.provenance}, {y.provenance})")


def cmax(x: CReal, y: CReal) -> CReal:
    if x.exact is not None and y.exact is not None:
        return embed(max(x.exact, y.exact))
    return CReal(lambda n: max(x.approx(n), y.approx(n)), f"max({x.provenance}, {y.provenance})")


def cabs(x: CReal) -> CReal:
    if x.exact is not None:
        return embed(abs(x.exact))
    return CReal(lambda n: abs(x.approx(n)), f"abs({x.provenance})")


def mul(x: CReal, y: CReal) -> CReal:
    if x.exact is not None and y.exact is not None:
        return embed(x.exact * y.exact)
    # |x| <= |x.approx(0)| + 1, likewise for y
    bound = max(abs(x.approx(0)), abs(y.approx(0))) + 1
    shift = 1 + ceil_log2(bound + 1)

    def fn(n: int) -> Fraction:
        k = n + shift
        return x.approx(k) * y.approx(k)

    return CReal(fn, f"mul({x.provenance}, {y.provenance})")


_ARITH = {"add": add, "sub": sub, "mul": mul, "min": cmin, "max": cmax}


def creal_arith(op: str, x: CReal, y: CReal | None = None) -> CReal:
    if op == "neg":
        return neg(x)
    if op == "abs":
        return cabs(x)
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown real operation {op!r}") from None
    if y is None:
        raise ValueError(f"{op} needs two operands")
    return fn(x, y)


class _IntervalStream:
    """Thread-safe cached view of a nested interval stream, checked on every pull."""

    def __init__(self, seq: Iterable[RatInterval]):
        self._it = iter(seq)
        self._items: list[RatInterval] = []
        self._widths: list[Fraction] = []
        self._lock = threading.Lock()

    def __getitem__(self, k: int) -> RatInterval:
        with self._lock:
            while len(self._items) <= k:
                try:
                    nxt = next(self._it)
                except StopIteration:
                    raise NestingViolation(f"interval stream ended after {len(self._items)} intervals") from None
                if self._items:
                    k_new = len(self._items)
                    prev = self._items[-1]
                    if not prev.contains(nxt):
                        raise NestingViolation(f"interval {k_new} {nxt} escapes interval {k_new - 1} {prev}")
                    if nxt.width * (1 << k_new) > self._widths[0]:
                        raise NestingViolation(f"interval {k_new} {nxt} is wider than width(0)/2^{k_new}")
                self._items.append(nxt)
                self._widths.append(nxt.width)
            return self._items[k]

    def width(self, k: int) -> Fraction:
        self[k]
        return self._widths[k]

    def pulled(self) -> list[RatInterval]:
        with self._lock:
            return list(self._items)


class _LimitReal(CReal):
    __slots__ = ("stream",)


def _make_limit(fn, provenance, stream):
    x = _LimitReal(fn, provenance)
    x.stream = stream
    return x


def limit_of_nested(seq: Iterable[RatInterval], provenance: str = "nested-interval limit") -> CReal:
    """The real lying in every interval of a nested, halving-or-faster stream.

    Raises :class:`NestingViolation` (from ``approx``) when a pulled interval
    escapes its predecessor.
    """
    stream = _IntervalStream(seq)

    def fn(n: int) -> Fraction:
        # widths never grow, so the first k with width <= 2^(1-n) is found by
        # bisection below the index where width(0)/2^k guarantees it
        threshold = pow2(1 - n)
        w0 = stream.width(0)
        if w0 <= threshold:
            return stream[0].midpoint
        lo, hi = 0, ceil_log2(w0 / threshold)
        stream[hi]
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if stream.width(mid) <= threshold:
                hi = mid
            else:
                lo = mid
        return stream[hi].midpoint

    return _make_limit(fn, provenance, stream)


@dataclass(frozen=True)
class ApartnessWitness:
    precision: int
    left_approx: Fraction
    right_approx: Fraction
    gap_lower_bound: Fraction

    def check(self, x: CReal, y: CReal) -> bool:
        """Re-evaluate both reals and confirm the certificate."""
        n = self.precision
        a, b = x.approx(n), y.approx(n)
        return (
            a == self.left_approx
            and b == self.right_approx
            and self.gap_lower_bound > 0
            and abs(a - b) - pow2(1 - n) >= self.gap_lower_bound
        )

    def consistent(self) -> bool:
        return self.gap_lower_bound > 0 and abs(self.left_approx - self.right_approx) - pow2(1 - self.precision) >= self.gap_lower_bound


def apartness_at(a: Fraction, b: Fraction, n: int) -> ApartnessWitness | None:
    gap = abs(a - b) - pow2(1 - n)
    if gap > 0:
        return ApartnessWitness(n, a, b, gap)
    return None


def apart(x: CReal, y: CReal, fuel: Fuel | int) -> SearchOutcome:
    """Search n = 0, 1, ... for |x(n) - y(n)| > 2**(1-n); one fuel unit per n."""
    fuel = Fuel.of(fuel)
    start = fuel.spent
    n = 0
    while fuel.take():
        w = apartness_at(x.approx(n), y.approx(n), n)
        if w is not None:
            return Found(w, fuel.spent - start)
        n += 1
    return Exhausted(fuel.spent - start)


BELOW_B = "BelowB"
ABOVE_A = "AboveA"


def locate(x: CReal, a, b) -> str:
    """Decide x < b or x > a for a < b, with one precision query.

    Returns :data:`BELOW_B` or :data:`ABOVE_A`.  Midpoint ties go to ``BelowB``.
    """
    a, b = rat(a), rat(b)
    if a >= b:
        raise BadStraddle(f"locate needs a < b, got {format_rational(a)} >= {format_rational(b)}")
    n = min_precision_below((b - a) / 4)
    return BELOW_B if x.approx(n) <= (a + b) / 2 else ABOVE_A


def render_precision(decimals: int) -> int:
    # ceil(d * log2(10)) + 2, computed on integers
    return (10**decimals - 1).bit_length() + 2


def round_decimal(q: Fraction, decimals: int) -> str:
    scale = 10**decimals
    scaled = q * scale
    sign = "-" if scaled < 0 else ""
    units = (abs(scaled) + Fraction(1, 2)).__floor__()
    if units == 0:
        sign = ""
    whole, frac = divmod(units, scale)
    if decimals == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{decimals}d}"


def render(x: CReal, decimals: int) -> str:
    """Decimal rendering ``"<digits> ±10^-d"``."""
    return f"{round_decimal(x.approx(render_precision(decimals)), decimals)} ±10^-{decimals}"
