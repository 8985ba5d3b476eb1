"""Refuting "locally constant" claims for functions with two distinct values.

Starting from a distinct-value witness on [p, q], repeated halving keeps a
half whose endpoint values stay certifiably apart.  The nested intervals
close in on a point d; any claimed constancy ball around d eventually
swallows a whole stage interval, whose endpoints still differ.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Iterator, Optional

from .cfunc import CFunc, LocalityOracle, eval_at
from .creal import ApartnessWitness, CReal, Exhausted, Found, Fuel, SearchOutcome, embed, limit_of_nested
from .errors import GapCollapse, WitnessInvalid
from .exact import RatInterval, min_precision_at_most, pow2
from .witness import DistinctValueWitness, find_distinct

DEFAULT_MAX_DEPTH = 64

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class Stage:
    interval: RatInterval
    gap_bound: Fraction
    side_choice: Optional[str]  # None for the initial interval
    # certifies f(lo) and f(hi) apart by at least gap_bound
    endpoint_gap: ApartnessWitness


@dataclass(frozen=True)
class NestedRun:
    stages: tuple[Stage, ...]
    limit: CReal


def _value(f: CFunc, point: Fraction) -> CReal:
    return eval_at(f, embed(point))


def _initial_stage(f: CFunc, w: DistinctValueWitness) -> Stage:
    if not w.check(f):
        raise WitnessInvalid(f"distinct-value witness at p={w.p}, q={w.q} does not re-check")
    vw = w.value_witness
    if w.p <= w.q:
        interval, gap = RatInterval(w.p, w.q), vw
    else:
        interval = RatInterval(w.q, w.p)
        gap = ApartnessWitness(vw.precision, vw.right_approx, vw.left_approx, vw.gap_lower_bound)
    return Stage(interval, vw.gap_lower_bound, None, gap)


def _halve(f: CFunc, stage: Stage) -> Stage:
    """One halving step; keeps the side with the larger approximate gap (ties left)."""
    eps = stage.gap_bound
    p, q = stage.interval.lo, stage.interval.hi
    r = stage.interval.midpoint
    n = min_precision_at_most(eps / 16)
    ap, ar, aq = (_value(f, pt).approx(n) for pt in (p, r, q))
    left_gap, right_gap = abs(ap - ar), abs(ar - aq)
    slack = pow2(1 - n)
    if left_gap < slack and right_gap < slack:
        raise GapCollapse(f"both halves of {stage.interval} lost their gap at precision {n}")
    if left_gap >= right_gap:
        side, interval, lo_a, hi_a, gap = LEFT, RatInterval(p, r), ap, ar, left_gap
    else:
        side, interval, lo_a, hi_a, gap = RIGHT, RatInterval(r, q), ar, aq, right_gap
    certified = gap - slack
    new_eps = eps / 4
    if certified < new_eps:
        raise GapCollapse(f"certified gap {certified} fell below {new_eps} on {interval}")
    return Stage(interval, new_eps, side, ApartnessWitness(n, lo_a, hi_a, certified))


class _StageCache:
    """Lazily extended, shared list of bisection stages."""

    def __init__(self, f: CFunc, first: Stage):
        self.f = f
        self.items = [first]
        self._lock = threading.Lock()

    def __getitem__(self, k: int) -> Stage:
        with self._lock:
            while len(self.items) <= k:
                self.items.append(_halve(self.f, self.items[-1]))
            return self.items[k]

    def intervals(self) -> Iterator[RatInterval]:
        for k in count():
            yield self[k].interval


def _constant_tail(stages: list[Stage]) -> Iterator[RatInterval]:
    for s in stages:
        yield s.interval
    tip = RatInterval.point(stages[-1].interval.midpoint)
    while True:
        yield tip


def bisect_run(f: CFunc, w: DistinctValueWitness, depth: int) -> NestedRun:
    """Halve ``depth`` times; the limit of a finite run is pinned to the last midpoint."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    cache = _StageCache(f, _initial_stage(f, w))
    stages = [cache[k] for k in range(depth + 1)]
    return NestedRun(tuple(stages), limit_of_nested(_constant_tail(stages), "finite bisection run"))


@dataclass(frozen=True)
class LocalityContradiction:
    center: Fraction
    center_precision: int
    claimed_radius: Fraction
    inner_stage: int
    interval: RatInterval
    endpoint_gap: ApartnessWitness
    stages: tuple[Stage, ...]

    def check(self, f: CFunc, oracle: LocalityOracle) -> bool:
        c, r, I = self.center, self.claimed_radius, self.interval
        return (
            oracle.radius_at(c) == r
            and r > 0
            and c - r < I.lo
            and I.hi < c + r
            and f.domain.contains(I)
            and self.endpoint_gap.check(_value(f, I.lo), _value(f, I.hi))
        )


def refute_locality(
    f: CFunc,
    oracle: LocalityOracle,
    search_fuel: Fuel | int,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> SearchOutcome:
    fuel = Fuel.of(search_fuel)
    start = fuel.spent
    outcome = find_distinct(f, fuel)
    if not outcome.found:
        return outcome
    spent = fuel.spent - start
    cache = _StageCache(f, _initial_stage(f, outcome.witness))
    d = limit_of_nested(cache.intervals(), "bisection limit")
    w0 = cache[0].interval.width

    def stage_for(n: int) -> int:
        # first k with w0 / 2^k <= 2^(1-n), i.e. the stage d.approx(n) reads
        k = 0
        while w0 > pow2(1 - n + k):
            k += 1
        return k

    n = 0
    while True:
        k_n = stage_for(n)
        if k_n > max_depth:
            return Exhausted(spent)
        c = d.approx(n)
        r = oracle.radius_at(c)
        if pow2(-n) < r / 4:
            break
        n += 1

    for k in range(k_n + 1):
        I = cache[k].interval
        if c - r < I.lo and I.hi < c + r:
            stage = cache[k]
            return Found(
                LocalityContradiction(c, n, r, k, I, stage.endpoint_gap, tuple(cache[j] for j in range(k_n + 1))),
                spent,
            )
    # unreachable: stage k_n has width < r/2 and contains d, with |d - c| < r/4
    raise AssertionError("no stage fitted inside the claimed ball")
