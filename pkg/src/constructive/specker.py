"""Specker-style sequences and the two-set decomposition of [0, 1].

A halting source enumerates a set of indices stage by stage.  The stream

    s_n = (raw(n) + 1 - 2^-n) / 2,   raw(n) = sum of 2^-(i+1) over stage(n)

is rational, strictly increasing and stays in [0, 1).  With A the union of
[0, s_n) and B the intersection of [s_n, 1], membership in A and
non-membership in B are the semidecidable directions searched here.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .creal import CReal, Exhausted, Found, Fuel, SearchOutcome, embed
from .errors import PrecheckFailed, SourceViolation
from .exact import format_rational, pow2, rat
from .topology import OpenSet

DEFAULT_SPECKER_FUEL = 512


class HaltingSource:
    """Stage-wise enumeration of halted indices.

    Built either from ``stage_fn(n)`` giving the whole stage, or from
    ``halt_fn(i, n)`` telling whether index i has halted within n steps.
    Stages are computed in order, validated once when first computed
    (boundedness and monotonicity) and remembered as the indices new at
    each stage.
    """

    def __init__(
        self,
        stage_fn: Callable[[int], Iterable[int]] | None = None,
        name: str = "source",
        spec: str | None = None,
        *,
        halt_fn: Callable[[int, int], bool] | None = None,
    ):
        if (stage_fn is None) == (halt_fn is None):
            raise ValueError("give exactly one of stage_fn or halt_fn")
        self._stage_fn = stage_fn
        self._halt_fn = halt_fn
        self.name = name
        self.spec = spec or name
        self._new: list[frozenset[int]] = []
        self._prev: frozenset[int] = frozenset()
        self._pending: list[int] = []
        self._lock = threading.Lock()

    def _next_stage(self, k: int) -> frozenset[int]:
        if self._stage_fn is not None:
            current = frozenset(self._stage_fn(k))
            if current and (min(current) < 0 or max(current) > k):
                raise SourceViolation(f"{self.name}: stage({k}) = {sorted(current)} is not within 0..{k}")
            if not self._prev <= current:
                raise SourceViolation(f"{self.name}: stage({k - 1}) is not contained in stage({k})")
            new, self._prev = current - self._prev, current
            return new
        self._pending.append(k)
        new, still = [], []
        for i in self._pending:
            (new if self._halt_fn(i, k) else still).append(i)
        self._pending = still
        return frozenset(new)

    def new_at(self, n: int) -> frozenset[int]:
        """Indices that halt at stage n and not before."""
        if n < 0:
            raise ValueError("stage index must be >= 0")
        with self._lock:
            while len(self._new) <= n:
                self._new.append(self._next_stage(len(self._new)))
            return self._new[n]

    def stage(self, n: int) -> frozenset[int]:
        self.new_at(n)
        with self._lock:
            return frozenset().union(*self._new[: n + 1])

    def __repr__(self):
        return f"HaltingSource({self.spec})"


def empty_source() -> HaltingSource:
    return HaltingSource(lambda n: (), "empty")


def table_source(entries: Sequence[tuple[int, int]], name: str = "table") -> HaltingSource:
    """Index i halts at stage n for each (i, n) entry."""
    entries = tuple((int(i), int(n)) for i, n in entries)
    spec = "table [" + ", ".join(f"({i}, {n})" for i, n in entries) + "]"
    return HaltingSource(lambda n: {i for i, at in entries if at <= n}, name, spec)


_collatz_lock = threading.Lock()
# start -> (current value, steps taken); resumed rather than recomputed
_collatz_progress: dict[int, tuple[int, int]] = {}


def _collatz_steps(start: int, cap: int) -> int | None:
    """Steps for the 3x+1 trajectory of ``start`` to reach 1, or None beyond ``cap``."""
    with _collatz_lock:
        x, steps = _collatz_progress.get(start, (start, 0))
        while x != 1 and steps < cap:
            x = x // 2 if x % 2 == 0 else 3 * x + 1
            steps += 1
        _collatz_progress[start] = (x, steps)
    return steps if x == 1 and steps <= cap else None


def collatz_source() -> HaltingSource:
    """Index i halts by stage n iff i <= n and the trajectory of i+1 hits 1 within n steps."""
    return HaltingSource(name="collatz", halt_fn=lambda i, n: _collatz_steps(i + 1, n) is not None)


def builtin_sources() -> list[HaltingSource]:
    return [empty_source(), collatz_source()]


def specker_formula(halted: Iterable[int], n: int) -> Fraction:
    raw = sum((pow2(-(i + 1)) for i in halted), Fraction(0))
    return (raw + 1 - pow2(-n)) / 2


class SpeckerStream:
    """s_n for a source, with raw(n) accumulated stage by stage."""

    def __init__(self, source: HaltingSource, name: str = ""):
        self.source = source
        self.name = name or f"specker({source.name})"
        self._raw: list[Fraction] = []
        self._lock = threading.Lock()

    def raw(self, n: int) -> Fraction:
        self.source.new_at(n)
        with self._lock:
            while len(self._raw) <= n:
                k = len(self._raw)
                step = sum((pow2(-(i + 1)) for i in self.source.new_at(k)), Fraction(0))
                self._raw.append(step + (self._raw[-1] if self._raw else 0))
            return self._raw[n]

    def term(self, n: int) -> Fraction:
        return (self.raw(n) + 1 - pow2(-n)) / 2


def specker_term(stream: SpeckerStream, n: int) -> Fraction:
    return stream.term(n)


@dataclass(frozen=True)
class BelowTermWitness:
    """x < s_n, read off ``approx = x.approx(n)``: approx + 2^-n + margin = s_n."""

    n: int
    approx: Fraction
    margin: Fraction

    def check(self, stream: SpeckerStream, x: CReal) -> bool:
        a = x.approx(self.n)
        return (
            a == self.approx
            and self.margin > 0
            and stream.term(self.n) - a - pow2(-self.n) == self.margin
        )


def _below_some_term(stream: SpeckerStream, x: CReal, fuel: Fuel | int) -> SearchOutcome:
    fuel = Fuel.of(fuel)
    start = fuel.spent
    n = 1
    while fuel.take():
        a = x.approx(n)
        margin = stream.term(n) - a - pow2(-n)
        if margin > 0:
            return Found(BelowTermWitness(n, a, margin), fuel.spent - start)
        n += 1
    return Exhausted(fuel.spent - start)


def in_A(stream: SpeckerStream, x: CReal, fuel: Fuel | int = DEFAULT_SPECKER_FUEL) -> SearchOutcome:
    """Certify x in A by finding n with x < s_n (one fuel unit per n, from n = 1)."""
    return _below_some_term(stream, x, fuel)


def refute_in_B(stream: SpeckerStream, x: CReal, fuel: Fuel | int = DEFAULT_SPECKER_FUEL) -> SearchOutcome:
    """Certify x not in B; the search is the one for A, since x < s_n excludes x from B."""
    return _below_some_term(stream, x, fuel)


def below_all_checked(stream: SpeckerStream, x, upto: int) -> bool:
    """Bounded check s_n <= x for n <= upto (x rational)."""
    x = rat(x)
    return all(stream.term(n) <= x for n in range(upto + 1))


def closure_search(
    stream: SpeckerStream,
    seq: Sequence[tuple],
    limit: CReal,
    fuel: Fuel | int = DEFAULT_SPECKER_FUEL,
    slice: int = DEFAULT_SPECKER_FUEL,
) -> SearchOutcome:
    """Sequential closure of A on one instance.

    ``seq`` holds (point, k) pairs claiming |point - limit| <= 2^-k; every point
    must certify into A under ``slice`` and sit that close to ``limit``.  Then
    the search for x < s_m runs on the limit itself.
    """
    for point, k in seq:
        point = rat(point)
        if not in_A(stream, embed(point), slice).found:
            raise PrecheckFailed(f"{format_rational(point)} was not certified in A")
        if abs(point - limit.approx(k)) > pow2(-k) + pow2(-k):
            raise PrecheckFailed(f"{format_rational(point)} is not within 2^-{k} of the limit")
    return in_A(stream, limit, fuel)


def a_as_openset(stream: SpeckerStream, name: str = "A") -> OpenSet:
    """Ball k is (-1, s_k), so the union meets [0, 1] exactly in A."""

    def ball(k: int):
        s = stream.term(k)
        return (s - 1) / 2, (s + 1) / 2

    return OpenSet(ball, None, name, f"specker_A({stream.name})")


def modulus_search(stream: SpeckerStream, n: int, fuel: Fuel | int) -> SearchOutcome:
    """Look for a stage N after which s stays within 2^-n of its supremum.

    Succeeds once every index <= n has halted by some stage N >= n; one fuel
    unit per stage inspected.  Exhaustion says nothing about the limit.
    """
    fuel = Fuel.of(fuel)
    start = fuel.spent
    N = n
    while fuel.take():
        if set(range(n + 1)) <= stream.source.stage(N):
            return Found(N, fuel.spent - start)
        N += 1
    return Exhausted(fuel.spent - start)
