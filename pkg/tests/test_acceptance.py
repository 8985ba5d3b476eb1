"""The ten acceptance criteria, one test each.

Every test records a single PASS/FAIL line (printed in the terminal summary)
and asserts at the stated tolerance and runtime limit.
"""
import random
import subprocess
import sys
from contextlib import contextmanager
from fractions import Fraction
from math import ceil, log2
from time import perf_counter

import pytest

from constructive.cfunc import CFunc, LocalityOracle, eval_at, parse_func
from constructive.creal import Exhausted, apart, creal_arith, embed
from constructive.exact import RatInterval, pow2
from constructive.refuter import bisect_run, refute_locality
from constructive.report import render_machine, verify_text
from constructive.scenario import run_scenario_text
from constructive.specker import (
    SpeckerStream,
    closure_search,
    collatz_source,
    empty_source,
    in_A,
    table_source,
)
from constructive.topology import CoverageGapSuspect, OpenSet, Overlap, refute_partition
from constructive.witness import find_distinct

from conftest import SCENARIOS, jittered, nested

F = Fraction
UNIT = RatInterval(F(0), F(1))
RESULTS: dict[str, str] = {}


@contextmanager
def criterion(num, title, limit=None):
    info = {"detail": ""}
    start = perf_counter()
    ok = False
    try:
        yield info
        elapsed = perf_counter() - start
        info["detail"] += f"{', ' if info['detail'] else ''}{elapsed:.3f}s"
        if limit is not None and elapsed >= limit:
            info["detail"] += f" exceeds {limit}s"
            raise AssertionError(f"criterion {num} took {elapsed:.3f}s, limit {limit}s")
        ok = True
    finally:
        line = f"criterion {num:>3} {'PASS' if ok else 'FAIL'}: {title} ({info['detail']})"
        RESULTS[str(num)] = line
        print(line)


# -- 1 -----------------------------------------------------------------------

def test_c01_nested_interval_exactness():
    with criterion(1, "bisect_run widths are 1/2^k exactly for k <= 64", limit=1) as info:
        f = CFunc(parse_func("x"), UNIT)
        w = find_distinct(f, 64).witness
        run = bisect_run(f, w, 64)
        widths = [s.interval.width for s in run.stages]
        assert widths == [F(1, 2**k) for k in range(65)]
        info["detail"] = f"{len(widths)} stages"


# -- 2 -----------------------------------------------------------------------

@pytest.mark.parametrize("r", [F(1, 10), F(1, 100), F(1, 1000)], ids=["r=1/10", "r=1/100", "r=1/1000"])
def test_c02_refuter_depth_bound(r):
    num = {F(1, 10): "2a", F(1, 100): "2b", F(1, 1000): "2c"}[r]
    with criterion(num, f"refute_locality radius {r}: verified stage <= ceil(log2(1/r)) + 2", limit=1) as info:
        f = CFunc(parse_func("x"), UNIT)
        oracle = LocalityOracle(radius=r)
        out = refute_locality(f, oracle, 64)
        assert out.found
        c = out.witness
        bound = ceil(log2(1 / r)) + 2
        info["detail"] = f"stage {c.inner_stage}, bound {bound}"
        assert c.check(f, oracle)
        assert c.inner_stage <= bound


# -- 3 -----------------------------------------------------------------------

def test_c03_corpus_witness_soundness():
    with criterion(3, "every Found witness in the golden corpus verifies") as info:
        total, kinds = 0, set()
        for path in SCENARIOS:
            results = verify_text(render_machine(run_scenario_text(path.read_text())))
            failed = [r for r in results if not r.passed]
            assert not failed, failed
            total += len(results)
            kinds |= {r.kind for r in results}
        assert {"apartness", "membership", "overlap", "closure"} <= kinds
        info["detail"] = f"{total} witnesses over {len(SCENARIOS)} scenarios, kinds {sorted(kinds)}"


# -- 4 -----------------------------------------------------------------------

def _random_creal(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.3:
        q = F(rng.randint(-40, 40), rng.randint(1, 16))
        kind = rng.choice(["jitter", "jitter", "nested", "embed"])
        if kind == "jitter":
            return jittered(q, rng.randint(0, 10**6)), q
        if kind == "nested":
            return nested(q), q
        return embed(q), q
    op = rng.choice(["add", "sub", "mul", "min", "max", "neg", "abs"])
    x, a = _random_creal(rng, depth - 1)
    if op in ("neg", "abs"):
        return creal_arith(op, x), (-a if op == "neg" else abs(a))
    y, b = _random_creal(rng, depth - 1)
    value = {"add": a + b, "sub": a - b, "mul": a * b, "min": min(a, b), "max": max(a, b)}[op]
    return creal_arith(op, x, y), value


def test_c04_modulus_property():
    with criterion(4, "|approx(n) - approx(m)| <= 2^-n + 2^-m on random CReals, n, m <= 30", limit=30) as info:
        rng = random.Random(20261015)
        violations = checks = 0
        count = 1000
        for _ in range(count):
            x, value = _random_creal(rng, 4)
            a = [x.approx(n) for n in range(31)]
            for n in range(31):
                if abs(a[n] - value) > pow2(-n):
                    violations += 1
                for m in range(n + 1, 31):
                    checks += 1
                    if abs(a[n] - a[m]) > pow2(-n) + pow2(-m):
                        violations += 1
        info["detail"] = f"{count} reals, {checks} pairs, {violations} violations"
        assert violations == 0


# -- 5 -----------------------------------------------------------------------

def _random_expr(rng: random.Random, depth: int):
    """(text, exact evaluator) built side by side."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return "x", lambda v: v
        q = F(rng.randint(-9, 9), rng.randint(1, 9))
        text = f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)
        return (f"({text})" if q < 0 else text), lambda v, q=q: q
    op = rng.choice(["+", "-", "*", "min", "max", "abs", "neg", "subst"])
    s1, f1 = _random_expr(rng, depth - 1)
    if op == "abs":
        return f"abs({s1})", lambda v: abs(f1(v))
    if op == "neg":
        return f"-({s1})", lambda v: -f1(v)
    s2, f2 = _random_expr(rng, depth - 1)
    if op == "+":
        return f"({s1} + {s2})", lambda v: f1(v) + f2(v)
    if op == "-":
        return f"({s1} - {s2})", lambda v: f1(v) - f2(v)
    if op == "*":
        return f"({s1} * {s2})", lambda v: f1(v) * f2(v)
    if op == "subst":
        return f"subst({s1}, {s2})", lambda v: f1(f2(v))
    fn = min if op == "min" else max
    return f"{op}({s1}, {s2})", lambda v: fn(f1(v), f2(v))


def test_c05_oracle_equivalence():
    with criterion(5, "eval_at precision 20 within 2^-20 of the exact value on random expressions") as info:
        rng = random.Random(5)
        dom = RatInterval(F(-2), F(2))
        violations = 0
        count = 500
        for _ in range(count):
            text, fn = _random_expr(rng, 4)
            f = CFunc(parse_func(text), dom)
            q = F(rng.randint(-64, 64), 32)
            exact = fn(q)
            for x in (embed(q), jittered(q, rng.randint(0, 10**6))):
                if abs(eval_at(f, x).approx(20) - exact) > pow2(-20):
                    violations += 1
        info["detail"] = f"{count} expressions at embedded and jittered inputs, {violations} violations"
        assert violations == 0


# -- 6 -----------------------------------------------------------------------

def test_c06_overlap_pair():
    with criterion("6a", "refute_partition on the overlapping cover gives a verified Overlap", limit=2) as info:
        A = OpenSet.balls([(0, F(3, 10)), (F(3, 10), F(3, 10))])
        B = OpenSet.balls([(1, F(3, 10)), (F(7, 10), F(3, 10))])
        out = refute_partition(A, B, UNIT)
        assert out.found and isinstance(out.witness, Overlap)
        assert out.witness.check(A, B)
        info["detail"] = f"overlap at {out.witness.point}, fuel {out.fuel_spent}"


def test_c06_gapped_pair():
    with criterion("6b", "refute_partition on the 1/50 gap gives CoverageGapSuspect within 1/50 of 1/2", limit=2) as info:
        r = F(49, 200)
        A = OpenSet.balls([(0, r), (r, r)])
        B = OpenSet.balls([(1, r), (1 - r, r)])
        out = refute_partition(A, B, UNIT)
        assert out.found and isinstance(out.witness, CoverageGapSuspect)
        info["detail"] = f"suspect at {out.witness.point}, fuel {out.fuel_spent}"
        assert abs(out.witness.point - F(1, 2)) <= F(1, 50)


# -- 7 -----------------------------------------------------------------------

def _collatz_halted(n):
    def steps(m):
        k = 0
        while m != 1:
            m = m // 2 if m % 2 == 0 else 3 * m + 1
            k += 1
        return k

    return [i for i in range(n + 1) if steps(i + 1) <= n]


def test_c07_specker_terms():
    with criterion(7, "s_0 < ... < s_256 in [0, 1) matching the direct formula, empty and collatz", limit=2) as info:
        for source, halted in ((empty_source(), lambda n: []), (collatz_source(), _collatz_halted)):
            s = SpeckerStream(source)
            terms = [s.term(n) for n in range(257)]
            assert all(0 <= t < 1 for t in terms)
            assert all(a < b for a, b in zip(terms, terms[1:]))
            oracle = [(sum((F(1, 2 ** (i + 1)) for i in halted(n)), F(0)) + 1 - F(1, 2**n)) / 2 for n in range(257)]
            assert terms == oracle
        info["detail"] = "257 terms per source"


# -- 8 -----------------------------------------------------------------------

def test_c08_sequential_closure():
    with criterion(8, "closure_search on a stalled table finds m with s_m > sigma - 1/1000", limit=1) as info:
        entries = [(0, 2), (2, 3)]
        L = SpeckerStream(table_source(entries))
        sigma = (sum(F(1, 2 ** (i + 1)) for i, _ in entries) + 1) / 2
        target = sigma - F(1, 1000)
        limit = embed(target)
        seq = [(target - F(1, 2**k), k) for k in range(1, 8)]
        out = closure_search(L, seq, limit, 512)
        assert out.found
        m = out.witness.n
        info["detail"] = f"sigma {sigma}, m = {m}, s_m = {L.term(m)}"
        assert L.term(m) > target
        assert limit.approx(m) + pow2(-m) < L.term(m)
        assert out.witness.check(L, limit)


# -- 9 -----------------------------------------------------------------------

FUELS = [0, 1, 2, 3, 10, 100, 1000, 10_000]


def test_c09_honest_exhaustion():
    with criterion(9, "constants, apart(x, x) and in_A(1) stay Exhausted for fuel up to 10^4", limit=5) as info:
        consts = [CFunc(parse_func(t), UNIT) for t in ("2/3", "x + -(x)")]
        xs = [embed(F(1, 3)), jittered(F(2, 7), 99), nested(F(-5, 3))]
        streams = [SpeckerStream(empty_source()), SpeckerStream(collatz_source())]
        runs = 0
        for fuel in FUELS:
            outcomes = [find_distinct(f, fuel) for f in consts]
            outcomes += [apart(x, x, fuel) for x in xs]
            outcomes += [in_A(s, embed(1), fuel) for s in streams]
            for out in outcomes:
                assert isinstance(out, Exhausted) and out.fuel_spent == fuel
            runs += len(outcomes)
        info["detail"] = f"{runs} searches, fuels {FUELS[0]}..{FUELS[-1]}"


# -- 10 ----------------------------------------------------------------------

def _corpus_run() -> bytes:
    out = b""
    for path in SCENARIOS:
        proc = subprocess.run([sys.executable, "-m", "constructive", "run", str(path), "--machine"],
                              capture_output=True, check=True)
        out += proc.stdout
    return out


def test_c10_determinism():
    with criterion(10, "two full corpus runs give byte-identical machine reports") as info:
        first, second = _corpus_run(), _corpus_run()
        info["detail"] = f"{len(first)} bytes"
        assert first and first == second
