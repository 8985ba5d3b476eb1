from fractions import Fraction
from math import ceil, log2

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from constructive.cfunc import CFunc, LocalityOracle, eval_at, parse_func
from constructive.creal import ApartnessWitness, Exhausted, Found, embed
from constructive.errors import WitnessInvalid
from constructive.exact import RatInterval, pow2
from constructive.refuter import LocalityContradiction, bisect_run, refute_locality
from constructive.witness import DistinctValueWitness, find_distinct

F = Fraction
UNIT = RatInterval(F(0), F(1))


def identity():
    f = CFunc(parse_func("x"), UNIT)
    return f, find_distinct(f, 64).witness


def test_widths_halve_exactly():
    f, w = identity()
    run = bisect_run(f, w, 64)
    assert [s.interval.width for s in run.stages] == [pow2(-k) for k in range(65)]


def test_gap_bounds_persist_and_certify():
    f, w = identity()
    run = bisect_run(f, w, 20)
    eps0 = w.value_witness.gap_lower_bound
    for k, s in enumerate(run.stages):
        assert s.gap_bound >= eps0 / 4**k > 0
        I = s.interval
        assert s.endpoint_gap.check(eval_at(f, embed(I.lo)), eval_at(f, embed(I.hi)))
        assert s.endpoint_gap.gap_lower_bound >= s.gap_bound
        # oracle: f = x, so the true endpoint gap is the width
        assert I.width >= s.gap_bound
    for prev, cur in zip(run.stages, run.stages[1:]):
        assert prev.interval.contains(cur.interval)


def test_limit_lies_in_every_stage():
    f, w = identity()
    run = bisect_run(f, w, 30)
    for s in run.stages:
        for n in (0, 5, 20, 40):
            a = run.limit.approx(n)
            assert RatInterval(a - pow2(-n), a + pow2(-n)).intersect(s.interval)


def test_depth_zero():
    f, w = identity()
    run = bisect_run(f, w, 0)
    assert len(run.stages) == 1 and run.stages[0].interval == UNIT
    assert run.limit.approx(10) == F(1, 2)


def test_reversed_witness_is_oriented():
    f, w = identity()
    vw = w.value_witness
    flipped = DistinctValueWitness(w.q, w.p, ApartnessWitness(vw.precision, vw.right_approx, vw.left_approx, vw.gap_lower_bound))
    assert bisect_run(f, flipped, 3).stages[-1].interval == bisect_run(f, w, 3).stages[-1].interval


def test_invalid_witness():
    f, w = identity()
    bad = DistinctValueWitness(w.p, w.q, ApartnessWitness(2, F(0), F(1), F(3, 4)))
    with pytest.raises(WitnessInvalid):
        bisect_run(f, bad, 3)


@pytest.mark.parametrize("r", [F(1, 10), F(1, 100), F(1, 1000)])
def test_depth_bound(r):
    f, _ = identity()
    oracle = LocalityOracle(radius=r)
    out = refute_locality(f, oracle, 64)
    assert isinstance(out, Found)
    c = out.witness
    assert c.check(f, oracle)
    assert c.inner_stage <= ceil(log2(1 / r)) + 2
    assert c.interval.width * r.denominator < r.numerator  # width < r


def test_spec_stage_bound_for_tenth():
    f, _ = identity()
    assert refute_locality(f, LocalityOracle(radius=F(1, 10)), 64).witness.inner_stage <= 7


def test_constant_has_no_contradiction():
    f = CFunc(parse_func("1/2"), UNIT)
    out = refute_locality(f, LocalityOracle(radius=F(1, 10)), 100)
    assert isinstance(out, Exhausted)


def test_huge_radius_fits_immediately():
    f, _ = identity()
    oracle = LocalityOracle(table=[(0, 2), (1, 2)])
    out = refute_locality(f, oracle, 64)
    assert out.witness.inner_stage == 0 and out.witness.check(f, oracle)


def test_depth_budget_exhausts():
    f, _ = identity()
    out = refute_locality(f, LocalityOracle(radius=F(1, 1000)), 64, max_depth=3)
    assert isinstance(out, Exhausted)


@settings(deadline=None, max_examples=40)
@given(st.fractions(min_value=F(1, 5000), max_value=F(3, 2), max_denominator=5000),
       st.sampled_from(["x", "3 * x + -1", "x * x", "max(x, 1/3)", "-(x) + 2"]))
def test_contradictions_verify(r, text):
    f = CFunc(parse_func(text), UNIT)
    oracle = LocalityOracle(radius=r)
    out = refute_locality(f, oracle, 256)
    assert out.found
    c = out.witness
    assert c.check(f, oracle)
    # tampered copies must fail
    assert not LocalityContradiction(c.center, c.center_precision, r * 2, c.inner_stage, c.interval, c.endpoint_gap, ()).check(f, oracle)
    g = c.endpoint_gap
    bumped = ApartnessWitness(g.precision, g.left_approx, g.right_approx, g.gap_lower_bound * 2)
    assert not LocalityContradiction(c.center, c.center_precision, r, c.inner_stage, c.interval, bumped, ()).check(f, oracle)
