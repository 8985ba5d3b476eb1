from fractions import Fraction
from itertools import combinations

from hypothesis import given, settings
from hypothesis import strategies as st

from constructive.cfunc import CFunc, parse_func
from constructive.creal import Exhausted, Found
from constructive.exact import RatInterval, pow2
from constructive.witness import DistinctValueWitness, dyadic_prefix, find_distinct

from conftest import expressions

F = Fraction
UNIT = RatInterval(F(0), F(1))


def reference_dovetail(points, values, fuel):
    """Round t: first t points at precision t (values are exact), all pairs i < j."""
    spent = 0
    t = 0
    while True:
        t += 1
        k = min(t, len(points))
        if spent + k > fuel:
            return None, fuel
        spent += k
        for i, j in combinations(range(k), 2):
            gap = abs(values[i] - values[j]) - pow2(1 - t)
            if gap > 0:
                return (points[i], points[j], t, gap), spent


def test_dyadic_order():
    assert dyadic_prefix(UNIT, 8) == [F(0), F(1), F(1, 2), F(1, 4), F(3, 4), F(1, 8), F(3, 8), F(5, 8)]
    assert dyadic_prefix(RatInterval(F(2), F(4)), 3) == [F(2), F(4), F(3)]
    assert dyadic_prefix(RatInterval.point(F(1)), 5) == [F(1)]


@given(st.integers(0, 8))
def test_dyadic_density(L):
    pts = dyadic_prefix(UNIT, 2 ** (L + 1))
    assert len(set(pts)) == len(pts)
    for k in range(2**L):
        lo, hi = F(k, 2**L), F(k + 1, 2**L)
        assert any(lo <= p <= hi for p in pts)


def test_identity_witness():
    out = find_distinct(CFunc(parse_func("x"), UNIT), 64)
    assert isinstance(out, Found)
    w = out.witness
    assert (w.p, w.q, w.value_witness.precision, w.value_witness.gap_lower_bound) == (0, 1, 2, F(1, 2))
    assert out.fuel_spent == 3


def test_abs_witness():
    f = CFunc(parse_func("abs(x + -1/2)"), UNIT)
    out = find_distinct(f, 256)
    w = out.witness
    assert (w.p, w.q, w.value_witness.precision, w.value_witness.gap_lower_bound) == (0, F(1, 2), 3, F(1, 4))
    assert out.fuel_spent == 6
    assert w.check(f)


@given(st.integers(0, 2000))
def test_constant_never_found(fuel):
    out = find_distinct(CFunc(parse_func("2/3"), UNIT), fuel)
    assert isinstance(out, Exhausted) and out.fuel_spent == fuel


@settings(deadline=None, max_examples=80)
@given(expressions, st.integers(0, 200))
def test_matches_reference_dovetail(pair, fuel):
    text, fn = pair
    f = CFunc(parse_func(text), UNIT)
    pts = dyadic_prefix(UNIT, 64)
    expected, spent = reference_dovetail(pts, [fn(p) for p in pts], fuel)
    out = find_distinct(f, fuel)
    if expected is None:
        assert isinstance(out, Exhausted) and out.fuel_spent == fuel
    else:
        p, q, t, gap = expected
        w = out.witness
        assert (w.p, w.q, w.value_witness.precision, w.value_witness.gap_lower_bound) == (p, q, t, gap)
        assert out.fuel_spent == spent
        assert w.check(f)


@settings(deadline=None, max_examples=40)
@given(expressions, st.integers(0, 100), st.integers(0, 100))
def test_monotone_in_fuel(pair, a, b):
    f = CFunc(parse_func(pair[0]), UNIT)
    lo, hi = sorted((a, b))
    first = find_distinct(f, lo)
    if first.found:
        assert find_distinct(f, hi) == first


def test_forged_witness_fails():
    f = CFunc(parse_func("x"), UNIT)
    w = find_distinct(f, 64).witness
    forged = DistinctValueWitness(w.p, F(1, 2), w.value_witness)
    assert not forged.check(f)
    outside = DistinctValueWitness(w.p, F(2), w.value_witness)
    assert not outside.check(f)
