"""Shared strategies.

Expressions are generated as (text, evaluator) pairs: the evaluator is a
plain Fraction lambda built alongside the text, so it shares no code with
the package's parser or evaluators.
"""
from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st

from constructive.creal import CReal, limit_of_nested
from constructive.exact import RatInterval, pow2

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = sorted((ROOT / "scenarios").glob("*.scn"))

small_rationals = st.fractions(min_value=-8, max_value=8, max_denominator=64)


def _lit(q: Fraction) -> str:
    s = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return f"({s})" if q < 0 else s


_leaves = st.one_of(
    st.just(("x", lambda v: v)),
    small_rationals.map(lambda q: (_lit(q), lambda v, q=q: q)),
)


def _extend(children):
    unary = st.tuples(st.sampled_from(["neg", "abs"]), children)
    binary = st.tuples(st.sampled_from(["+", "-", "*", "min", "max", "subst"]), children, children)

    def build_unary(t):
        op, (s, f) = t
        if op == "neg":
            return f"-({s})", lambda v: -f(v)
        return f"abs({s})", lambda v: abs(f(v))

    def build_binary(t):
        op, (s1, f1), (s2, f2) = t
        if op in "+-*":
            fn = {"+": lambda v: f1(v) + f2(v), "-": lambda v: f1(v) - f2(v), "*": lambda v: f1(v) * f2(v)}[op]
            return f"({s1} {op} {s2})", fn
        if op == "subst":
            return f"subst({s1}, {s2})", lambda v: f1(f2(v))
        fn = min if op == "min" else max
        return f"{op}({s1}, {s2})", lambda v: fn(f1(v), f2(v))

    return st.one_of(unary.map(build_unary), binary.map(build_binary))


expressions = st.recursive(_leaves, _extend, max_leaves=8)


def jittered(q: Fraction, seed: int) -> CReal:
    """A non-exact real equal to q whose approximations wobble inside 2^-n."""

    def fn(n: int) -> Fraction:
        wobble = (seed * 7919 + n * 104729) % 2001 - 1000
        return q + Fraction(wobble, 1000) * pow2(-n)

    return CReal(fn, f"jittered({q})")


def nested(q: Fraction) -> CReal:
    """q as the limit of the lopsided nested intervals [q - 2^-k, q + 2^-(k+1)]."""

    def intervals():
        k = 0
        while True:
            yield RatInterval(q - pow2(-k), q + pow2(-k - 1))
            k += 1

    return limit_of_nested(intervals(), f"nested({q})")


@st.composite
def real_leaves(draw):
    q = draw(small_rationals)
    kind = draw(st.sampled_from(["jitter", "nested"]))
    x = jittered(q, draw(st.integers(0, 10**6))) if kind == "jitter" else nested(q)
    return x, q


def _combine(children):
    def build(t):
        op, (x, a), (y, b) = t
        if op == "+":
            return x + y, a + b
        if op == "-":
            return x - y, a - b
        if op == "*":
            return x * y, a * b
        if op == "neg":
            return -x, -a
        return abs(x), abs(a)

    return st.tuples(st.sampled_from(["+", "-", "*", "neg", "abs"]), children, children).map(build)


real_exprs = st.recursive(real_leaves(), _combine, max_leaves=6)


def pytest_terminal_summary(terminalreporter):
    import re
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for num in sorted(lines, key=lambda k: (int(re.match(r"\d+", k).group()), k)):
            terminalreporter.write_line(lines[num])
