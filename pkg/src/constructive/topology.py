"""Open sets as enumerations of rational balls, and the connectedness refuter.

Membership of a computable real in an open set is semidecidable: search the
balls at growing precision.  :func:`refute_partition` takes two open sets
claimed to split an interval and hunts for a point certified in both (or a
point that neither set seems to cover).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Callable, Optional, Sequence

from .creal import CReal, Exhausted, Found, Fuel, SearchOutcome, embed, limit_of_nested
from .errors import BadBounds
from .exact import RatInterval, format_rational, pow2, rat
from .witness import dyadic_points

DEFAULT_SLICE = 128
DEFAULT_PARTITION_FUEL = 1 << 14


class OpenSet:
    """Union of the open balls ``ball(0), ball(1), ...``.

    ``count`` is the number of balls for a finite list and None for an
    infinite enumeration.  ``spec`` is the scenario text that rebuilds the set.
    """

    def __init__(self, ball_fn: Callable[[int], tuple[Fraction, Fraction]], count: Optional[int], name: str = "", spec: str = ""):
        if count is not None and count <= 0:
            raise ValueError("an open set needs at least one ball")
        self._ball_fn = ball_fn
        self.count = count
        self.name = name
        self.spec = spec

    def ball(self, i: int) -> tuple[Fraction, Fraction]:
        if i < 0 or (self.count is not None and i >= self.count):
            raise IndexError(f"ball {i} out of range")
        c, r = self._ball_fn(i)
        if r <= 0:
            raise ValueError(f"ball {i} of {self.name or 'open set'} has radius {r}")
        return c, r

    def active(self, t: int) -> int:
        """Number of balls visited in dovetail round t."""
        return t if self.count is None else min(t, self.count)

    @classmethod
    def balls(cls, pairs: Sequence[tuple], name: str = "") -> "OpenSet":
        table = tuple((rat(c), rat(r)) for c, r in pairs)
        if any(r <= 0 for _, r in table):
            raise ValueError("ball radii must be positive")
        spec = "balls [" + ", ".join(f"({format_rational(c)}, {format_rational(r)})" for c, r in table) + "]"
        return cls(table.__getitem__, len(table), name, spec)

    @classmethod
    def halfline_below(cls, t, step, name: str = "") -> "OpenSet":
        """Balls centred at t - step*2^-k*3/2 with radius step*2^-k/2, k = 0, 1, ..."""
        t, step = rat(t), rat(step)
        if step <= 0:
            raise ValueError("step must be positive")
        spec = f"halfline_below({format_rational(t)}, {format_rational(step)})"
        return cls(lambda k: (t - step * pow2(-k) * 3 / 2, step * pow2(-k) / 2), None, name, spec)

    @classmethod
    def halfline_above(cls, t, step, name: str = "") -> "OpenSet":
        t, step = rat(t), rat(step)
        if step <= 0:
            raise ValueError("step must be positive")
        spec = f"halfline_above({format_rational(t)}, {format_rational(step)})"
        return cls(lambda k: (t + step * pow2(-k) * 3 / 2, step * pow2(-k) / 2), None, name, spec)

    def union(self, other: "OpenSet", name: str = "") -> "OpenSet":
        """Fair interleaving of both enumerations; finite parts drop out once used up."""
        a, b = self, other
        spec = f"{a.spec} + {b.spec}"
        if a.count is not None and b.count is not None:
            return OpenSet(lambda i: a.ball(i) if i < a.count else b.ball(i - a.count), a.count + b.count, name, spec)
        if a.count is None and b.count is None:
            return OpenSet(lambda i: (a if i % 2 == 0 else b).ball(i // 2), None, name, spec)

        short, long_ = (a, b) if a.count is not None else (b, a)

        def fn(i: int):
            if i < 2 * short.count:
                return (a if i % 2 == 0 else b).ball(i // 2)
            return long_.ball(i - short.count)

        return OpenSet(fn, None, name, spec)

    def __add__(self, other: "OpenSet") -> "OpenSet":
        return self.union(other)

    def __str__(self):
        return self.spec


@dataclass(frozen=True)
class MembershipCert:
    """|x - center| <= radius - margin, read off ``approx = x.approx(precision)``."""

    ball_index: int
    center: Fraction
    radius: Fraction
    precision: int
    approx: Fraction
    margin: Fraction

    def check(self, S: OpenSet, x: CReal) -> bool:
        try:
            ball = S.ball(self.ball_index)
        except (IndexError, ValueError):
            return False
        return (
            ball == (self.center, self.radius)
            and self.margin == pow2(-self.precision)
            and x.approx(self.precision) == self.approx
            and abs(self.approx - self.center) <= self.radius - 2 * self.margin
        )


def _test_ball(S: OpenSet, i: int, x: CReal, n: int) -> Optional[MembershipCert]:
    c, r = S.ball(i)
    a = x.approx(n)
    margin = pow2(-n)
    if abs(a - c) <= r - 2 * margin:
        return MembershipCert(i, c, r, n, a, margin)
    return None


def member(S: OpenSet, x: CReal, fuel: Fuel | int) -> SearchOutcome:
    """Round t tests the first t balls at precision t; one fuel unit per test."""
    fuel = Fuel.of(fuel)
    start = fuel.spent
    for t in count(1):
        for i in range(S.active(t)):
            if not fuel.take():
                return Exhausted(fuel.spent - start)
            cert = _test_ball(S, i, x, t)
            if cert is not None:
                return Found(cert, fuel.spent - start)
    raise AssertionError("unreachable")


def certify_point(S: OpenSet, i: int, point) -> Optional[MembershipCert]:
    """Certificate that a rational point lies in ball i, if it lies strictly inside."""
    point = rat(point)
    c, r = S.ball(i)
    slack = r - abs(point - c)
    if slack <= 0:
        return None
    n = 0
    while 2 * pow2(-n) > slack:
        n += 1
    return MembershipCert(i, c, r, n, point, pow2(-n))


A_SIDE = "A"
B_SIDE = "B"
UNKNOWN = "Unknown"


def _classify(A: OpenSet, B: OpenSet, x: CReal, fuel_a: Fuel, fuel_b: Fuel):
    """Dovetail membership in A and B together; A wins ties at equal (ball, precision)."""
    for t in count(1):
        na, nb = A.active(t), B.active(t)
        progressed = False
        for i in range(max(na, nb)):
            if i < na and fuel_a.take():
                progressed = True
                cert = _test_ball(A, i, x, t)
                if cert is not None:
                    return A_SIDE, cert
            if i < nb and fuel_b.take():
                progressed = True
                cert = _test_ball(B, i, x, t)
                if cert is not None:
                    return B_SIDE, cert
        if not progressed:
            return UNKNOWN, None
    raise AssertionError("unreachable")


def _classify_under(A, B, x, total: Fuel, slice_size: int):
    return _classify(A, B, x, total.slice(slice_size), total.slice(slice_size))


def classify_rationals(A: OpenSet, B: OpenSet, bounds: RatInterval, count_: int, slice: int) -> list[tuple[Fraction, str]]:
    """Classify the first ``count_`` dyadic points of ``bounds`` as A, B or Unknown."""
    out = []
    for pt, _ in zip(dyadic_points(bounds), range(count_)):
        label, _cert = _classify(A, B, embed(pt), Fuel(slice), Fuel(slice))
        out.append((pt, label))
    return out


@dataclass(frozen=True)
class Overlap:
    point: Fraction
    cert_a: MembershipCert
    cert_b: MembershipCert

    def check(self, A: OpenSet, B: OpenSet) -> bool:
        x = embed(self.point)
        return self.cert_a.check(A, x) and self.cert_b.check(B, x)


@dataclass(frozen=True)
class CoverageGapSuspect:
    """No classification within budget.  A suspicion, not a proof."""

    point: Fraction
    fuel_spent: int


@dataclass(frozen=True)
class PartitionStage:
    interval: RatInterval
    a_point: Fraction
    a_cert: MembershipCert
    b_point: Fraction
    b_cert: MembershipCert


class _Unclassified(Exception):
    def __init__(self, point):
        self.point = point


class _Bisection:
    def __init__(self, A, B, total: Fuel, slice_size: int, first: PartitionStage):
        self.A, self.B, self.total, self.slice_size = A, B, total, slice_size
        self.items = [first]
        self._lock = threading.Lock()

    def __getitem__(self, k: int) -> PartitionStage:
        with self._lock:
            while len(self.items) <= k:
                self.items.append(self._step(self.items[-1]))
            return self.items[k]

    def _step(self, st: PartitionStage) -> PartitionStage:
        m = st.interval.midpoint
        label, cert = _classify_under(self.A, self.B, embed(m), self.total, self.slice_size)
        if label == UNKNOWN:
            raise _Unclassified(m)
        a_pt, a_cert, b_pt, b_cert = st.a_point, st.a_cert, st.b_point, st.b_cert
        if label == A_SIDE:
            a_pt, a_cert = m, cert
        else:
            b_pt, b_cert = m, cert
        return PartitionStage(RatInterval(min(a_pt, b_pt), max(a_pt, b_pt)), a_pt, a_cert, b_pt, b_cert)

    def intervals(self):
        for k in count():
            yield self[k].interval


def refute_partition(
    A: OpenSet,
    B: OpenSet,
    bounds: RatInterval,
    fuel: Fuel | int = DEFAULT_PARTITION_FUEL,
    slice: int = DEFAULT_SLICE,
) -> SearchOutcome:
    """Try to show that A and B do not partition ``bounds``.

    Found(Overlap) is a proof; Found(CoverageGapSuspect) only marks a point
    neither set could claim within its fuel slice.  Exhausted means no seed
    point was found in one of the sets.
    """
    if not bounds.lo < bounds.hi:
        raise BadBounds(f"degenerate bounds {bounds}")
    total = Fuel.of(fuel)
    start = total.spent

    # seeds: one point certified in A and one in B
    seed_a = seed_b = None
    for pt in dyadic_points(bounds):
        if total.remaining == 0:
            return Exhausted(total.spent - start)
        label, cert = _classify_under(A, B, embed(pt), total, slice)
        if label == A_SIDE and seed_a is None:
            seed_a = (pt, cert)
        elif label == B_SIDE and seed_b is None:
            seed_b = (pt, cert)
        if seed_a and seed_b:
            break

    (a_pt, a_cert), (b_pt, b_cert) = seed_a, seed_b
    first = PartitionStage(RatInterval(min(a_pt, b_pt), max(a_pt, b_pt)), a_pt, a_cert, b_pt, b_cert)
    stages = _Bisection(A, B, total, slice, first)
    s = limit_of_nested(stages.intervals(), "partition bisection limit")

    def suspect(point):
        return Found(CoverageGapSuspect(point, total.spent - start), total.spent - start)

    try:
        label, cert = _classify(A, B, s, total.slice(total.remaining), total.slice(total.remaining))
    except _Unclassified as exc:
        return suspect(exc.point)
    if label == UNKNOWN:
        return suspect(stages.items[-1].interval.midpoint)

    # s sits in one ball with margin m; the tail endpoint of the other set lies in it too
    m = cert.margin
    j = 0
    while pow2(-j) >= m / 4:
        j += 1
    try:
        a = s.approx(j)
        for k in count():
            st = stages[k]
            other = st.b_point if label == A_SIDE else st.a_point
            if abs(other - a) + pow2(-j) < m:
                break
    except _Unclassified as exc:
        return suspect(exc.point)

    if label == A_SIDE:
        cert_a, cert_b = certify_point(A, cert.ball_index, other), st.b_cert
    else:
        cert_a, cert_b = st.a_cert, certify_point(B, cert.ball_index, other)
    assert cert_a is not None and cert_b is not None
    return Found(Overlap(other, cert_a, cert_b), total.spent - start)
