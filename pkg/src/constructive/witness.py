"""Search for two points where a function provably takes different values."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from typing import Iterator

from .cfunc import CFunc, eval_at
from .creal import ApartnessWitness, CReal, Exhausted, Found, Fuel, SearchOutcome, apartness_at, embed
from .exact import RatInterval, pow2


def dyadic_points(bounds: RatInterval) -> Iterator[Fraction]:
    """Endpoints first, then each dyadic level's new (odd-numerator) points, left to right."""
    a, w = bounds.lo, bounds.width
    yield a
    if w == 0:
        return
    yield bounds.hi
    level = 1
    while True:
        step = w / (1 << level)
        for k in range(1, 1 << level, 2):
            yield a + step * k
        level += 1


def dyadic_prefix(bounds: RatInterval, count: int) -> list[Fraction]:
    return list(islice(dyadic_points(bounds), count))


@dataclass(frozen=True)
class DistinctValueWitness:
    p: Fraction
    q: Fraction
    value_witness: ApartnessWitness

    def check(self, f: CFunc) -> bool:
        return (
            self.p in f.domain
            and self.q in f.domain
            and self.value_witness.check(eval_at(f, embed(self.p)), eval_at(f, embed(self.q)))
        )


def _first_far_pair(a: list[Fraction], threshold: Fraction):
    """Lexicographically first (i, j), i < j, with |a[i] - a[j]| > threshold."""
    k = len(a)
    hi, lo = [None] * k, [None] * k
    for idx in range(k - 2, -1, -1):
        nxt = a[idx + 1]
        hi[idx] = nxt if hi[idx + 1] is None else max(nxt, hi[idx + 1])
        lo[idx] = nxt if lo[idx + 1] is None else min(nxt, lo[idx + 1])
    for i in range(k - 1):
        if hi[i] - a[i] > threshold or a[i] - lo[i] > threshold:
            j = next(j for j in range(i + 1, k) if abs(a[i] - a[j]) > threshold)
            return i, j
    return None, None


def find_distinct(f: CFunc, fuel: Fuel | int) -> SearchOutcome:
    """Dovetail: in round t, evaluate the first t points at precision t and test all pairs.

    One fuel unit per (point, precision) evaluation.  The first qualifying pair
    in (round, pair) lexicographic order is returned.
    """
    fuel = Fuel.of(fuel)
    start = fuel.spent
    points: list[Fraction] = []
    values: list[CReal] = []
    enum = dyadic_points(f.domain)
    t = 0
    while True:
        t += 1
        if len(points) < t:
            nxt = next(enum, None)
            if nxt is not None:
                points.append(nxt)
                values.append(eval_at(f, embed(nxt)))
        approx = []
        for v in values[:t]:
            if not fuel.take():
                return Exhausted(fuel.spent - start)
            approx.append(v.approx(t))
        i, j = _first_far_pair(approx, pow2(1 - t))
        if i is not None:
            w = apartness_at(approx[i], approx[j], t)
            return Found(DistinctValueWitness(points[i], points[j], w), fuel.spent - start)
