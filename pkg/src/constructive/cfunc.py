"""Constructive functions as interval extensions of a small expression grammar.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := '-' unary | atom
    atom    := 'x' | RATIONAL | '(' expr ')'
             | ('min' | 'max') '(' expr ',' expr ')'
             | 'abs' '(' expr ')'
             | 'subst' '(' expr ',' expr ')'

``RATIONAL`` is ``p`` or ``p/q``; a ``-`` written directly before a literal
folds into the constant.  ``subst(e, g)`` is ``e`` with ``x`` replaced by ``g``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .creal import CReal, creal_arith, embed
from .errors import DomainEscape, ParseError
from .exact import Empty, RatInterval, ceil_log2, format_rational, pow2, rat


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Neg:
    arg: "FuncExpr"


@dataclass(frozen=True)
class Abs:
    arg: "FuncExpr"


@dataclass(frozen=True)
class Add:
    left: "FuncExpr"
    right: "FuncExpr"


@dataclass(frozen=True)
class Sub:
    left: "FuncExpr"
    right: "FuncExpr"


@dataclass(frozen=True)
class Mul:
    left: "FuncExpr"
    right: "FuncExpr"


@dataclass(frozen=True)
class Min:
    left: "FuncExpr"
    right: "FuncExpr"


@dataclass(frozen=True)
class Max:
    left: "FuncExpr"
    right: "FuncExpr"


@dataclass(frozen=True)
class Subst:
    """``outer`` with the variable replaced by ``inner``."""

    outer: "FuncExpr"
    inner: "FuncExpr"


FuncExpr = Union[Var, Const, Neg, Abs, Add, Sub, Mul, Min, Max, Subst]

X = Var()


def const(q) -> Const:
    return Const(rat(q))


# -- evaluation --------------------------------------------------------------

def eval_exact(expr: FuncExpr, x) -> Fraction:
    """Exact value of ``expr`` at a rational point (the test oracle)."""
    if isinstance(expr, Var):
        return rat(x)
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Neg):
        return -eval_exact(expr.arg, x)
    if isinstance(expr, Abs):
        return abs(eval_exact(expr.arg, x))
    if isinstance(expr, Subst):
        return eval_exact(expr.outer, eval_exact(expr.inner, x))
    a, b = eval_exact(expr.left, x), eval_exact(expr.right, x)
    if isinstance(expr, Add):
        return a + b
    if isinstance(expr, Sub):
        return a - b
    if isinstance(expr, Mul):
        return a * b
    if isinstance(expr, Min):
        return min(a, b)
    if isinstance(expr, Max):
        return max(a, b)
    raise TypeError(f"not an expression node: {expr!r}")


def enclose(expr: FuncExpr, I: RatInterval) -> RatInterval:
    """Naive interval extension by structural recursion (no domain check)."""
    if isinstance(expr, Var):
        return I
    if isinstance(expr, Const):
        return RatInterval.point(expr.value)
    if isinstance(expr, Neg):
        return -enclose(expr.arg, I)
    if isinstance(expr, Abs):
        return abs(enclose(expr.arg, I))
    if isinstance(expr, Subst):
        return enclose(expr.outer, enclose(expr.inner, I))
    a, b = enclose(expr.left, I), enclose(expr.right, I)
    if isinstance(expr, Add):
        return a + b
    if isinstance(expr, Sub):
        return a - b
    if isinstance(expr, Mul):
        return a * b
    if isinstance(expr, Min):
        return a.min(b)
    if isinstance(expr, Max):
        return a.max(b)
    raise TypeError(f"not an expression node: {expr!r}")


def width_bound(expr: FuncExpr, domain: RatInterval) -> Fraction:
    """Rational L with width(enclose(expr, I)) <= L * width(I) for I inside domain."""
    if isinstance(expr, Var):
        return Fraction(1)
    if isinstance(expr, Const):
        return Fraction(0)
    if isinstance(expr, (Neg, Abs)):
        return width_bound(expr.arg, domain)
    if isinstance(expr, Subst):
        inner_range = enclose(expr.inner, domain)
        return width_bound(expr.outer, inner_range) * width_bound(expr.inner, domain)
    la, lb = width_bound(expr.left, domain), width_bound(expr.right, domain)
    if isinstance(expr, (Add, Sub)):
        return la + lb
    if isinstance(expr, (Min, Max)):
        return max(la, lb)
    if isinstance(expr, Mul):
        return enclose(expr.left, domain).magnitude * lb + enclose(expr.right, domain).magnitude * la
    raise TypeError(f"not an expression node: {expr!r}")


@dataclass(frozen=True)
class CFunc:
    expr: FuncExpr
    domain: RatInterval

    @property
    def lipschitz(self) -> Fraction:
        return width_bound(self.expr, self.domain)

    def __str__(self):
        return f"{to_text(self.expr)} on {self.domain}"


def eval_interval(f: CFunc, I: RatInterval) -> RatInterval:
    if not f.domain.contains(I):
        raise DomainEscape(f"{I} is not inside the domain {f.domain}")
    return enclose(f.expr, I)


DOMAIN_CHECK_PRECISION = 4


def eval_at(f: CFunc, x: CReal) -> CReal:
    """f(x) as a computable real.

    ``x`` is checked against the domain once, at precision 4, and trusted
    afterwards; approximation intervals are clipped to the domain.
    """
    dom = f.domain
    if x.exact is not None:
        if x.exact not in dom:
            raise DomainEscape(f"{format_rational(x.exact)} is outside {dom}")
        value = enclose(f.expr, RatInterval.point(x.exact))
        if value.width == 0:
            return embed(value.lo)
    else:
        a = x.approx(DOMAIN_CHECK_PRECISION)
        slack = pow2(-DOMAIN_CHECK_PRECISION)
        if not (dom.lo - slack <= a <= dom.hi + slack):
            raise DomainEscape(f"{x!r} is outside {dom} (approximation {format_rational(a)})")
    L = f.lipschitz
    extra = ceil_log2(L) if L > 1 else 0

    def fn(n: int) -> Fraction:
        target = pow2(-n)
        m = n + 1 + extra
        while True:
            box = x.enclosure(m).intersect(dom)
            if box is Empty:
                raise DomainEscape(f"{x!r} left {dom} at precision {m}")
            out = enclose(f.expr, box)
            if out.width <= target:
                return out.midpoint
            m += 1

    return CReal(fn, f"apply({to_text(f.expr)}, {x.provenance})")


def expr_creal(expr: FuncExpr, x: CReal | None = None) -> CReal:
    """Build the computable real denoted by ``expr`` with real arithmetic nodes.

    ``x`` supplies the variable; closed expressions need none.
    """
    if isinstance(expr, Var):
        if x is None:
            raise ValueError("expression mentions x but no value was given")
        return x
    if isinstance(expr, Const):
        return embed(expr.value)
    if isinstance(expr, Neg):
        return creal_arith("neg", expr_creal(expr.arg, x))
    if isinstance(expr, Abs):
        return creal_arith("abs", expr_creal(expr.arg, x))
    if isinstance(expr, Subst):
        return expr_creal(expr.outer, expr_creal(expr.inner, x))
    op = {Add: "add", Sub: "sub", Mul: "mul", Min: "min", Max: "max"}[type(expr)]
    return creal_arith(op, expr_creal(expr.left, x), expr_creal(expr.right, x))


# -- locality claims ---------------------------------------------------------

class LocalityOracle:
    """A claim that f is constant on (c - r, c + r) around each point c.

    Either a single constant radius or a table of (center, radius) entries
    answered by nearest center, ties toward the smaller center.
    """

    def __init__(self, radius=None, table=None):
        if (radius is None) == (table is None):
            raise ValueError("give exactly one of radius or table")
        if radius is not None:
            radius = rat(radius)
            if radius <= 0:
                raise ValueError("claimed radius must be positive")
            self.table = None
        else:
            table = sorted((rat(c), rat(r)) for c, r in table)
            if not table:
                raise ValueError("radius table is empty")
            if any(r <= 0 for _, r in table):
                raise ValueError("claimed radii must be positive")
            self.table = tuple(table)
        self.radius = radius

    def radius_at(self, c) -> Fraction:
        if self.table is None:
            return self.radius
        c = rat(c)
        # sorted by center, so min() keeps the smaller center on ties
        return min(self.table, key=lambda entry: abs(entry[0] - c))[1]

    def __str__(self):
        if self.table is None:
            return f"radius const {format_rational(self.radius)}"
        entries = ", ".join(f"({format_rational(c)}, {format_rational(r)})" for c, r in self.table)
        return f"radius table [{entries}]"


# -- text form ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*(),]))")
_FUNCS = {"min": Min, "max": Max, "abs": Abs, "subst": Subst}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise self._error(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def _error(self, message: str, offset: int) -> ParseError:
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return ParseError(message, line, col, offset)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def advance(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.advance()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise self._error(f"expected {value!r}, found {found}", pos)

    def parse(self) -> FuncExpr:
        expr = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise self._error(f"unexpected {text!r}", pos)
        return expr

    def expr(self) -> FuncExpr:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> FuncExpr:
        node = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.advance()
            node = Mul(node, self.unary())
        return node

    def unary(self) -> FuncExpr:
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            if self.peek()[0] == "num":
                return Const(-self._literal(self.advance()))
            return Neg(self.unary())
        return self.atom()

    def _literal(self, tok) -> Fraction:
        _, text, pos = tok
        num, _, den = text.partition("/")
        if den and int(den) == 0:
            raise self._error("zero denominator", pos)
        return Fraction(int(num), int(den) if den else 1)

    def atom(self) -> FuncExpr:
        tok = self.advance()
        kind, text, pos = tok
        if kind == "num":
            return Const(self._literal(tok))
        if kind == "name":
            if text == "x":
                return X
            ctor = _FUNCS.get(text)
            if ctor is None:
                raise self._error(f"unknown identifier {text!r}", pos)
            self.expect("(")
            first = self.expr()
            if ctor is Abs:
                self.expect(")")
                return Abs(first)
            self.expect(",")
            second = self.expr()
            self.expect(")")
            return ctor(first, second)
        if (kind, text) == ("op", "("):
            inner = self.expr()
            self.expect(")")
            return inner
        found = "end of input" if kind == "end" else repr(text)
        raise self._error(f"expected an operand, found {found}", pos)


def parse_func(text: str) -> FuncExpr:
    """Parse an expression; raises :class:`ParseError` with line/column."""
    return _Parser(text).parse()


# precedence levels for printing
_SUM, _PRODUCT, _UNARY, _ATOM = 1, 2, 3, 4


def to_text(expr: FuncExpr) -> str:
    """Canonical text; ``parse_func(to_text(e)) == e``."""
    return _show(expr)[0]


def _wrap(expr: FuncExpr, need: int) -> str:
    text, level = _show(expr)
    return f"({text})" if level < need else text


def _show(expr: FuncExpr) -> tuple[str, int]:
    if isinstance(expr, Var):
        return "x", _ATOM
    if isinstance(expr, Const):
        # a leading '-' folds into the literal, so negative constants act as unary
        return format_rational(expr.value), _ATOM if expr.value >= 0 else _UNARY
    if isinstance(expr, Neg):
        arg = expr.arg
        if isinstance(arg, Const) and arg.value >= 0:
            return f"-({format_rational(arg.value)})", _UNARY
        return "-" + _wrap(arg, _UNARY), _UNARY
    if isinstance(expr, Abs):
        return f"abs({to_text(expr.arg)})", _ATOM
    if isinstance(expr, (Min, Max, Subst)):
        name = {Min: "min", Max: "max", Subst: "subst"}[type(expr)]
        a, b = (expr.outer, expr.inner) if isinstance(expr, Subst) else (expr.left, expr.right)
        return f"{name}({to_text(a)}, {to_text(b)})", _ATOM
    if isinstance(expr, (Add, Sub)):
        sym = "+" if isinstance(expr, Add) else "-"
        return f"{_wrap(expr.left, _SUM)} {sym} {_wrap(expr.right, _PRODUCT)}", _SUM
    if isinstance(expr, Mul):
        return f"{_wrap(expr.left, _PRODUCT)} * {_wrap(expr.right, _UNARY)}", _PRODUCT
    raise TypeError(f"not an expression node: {expr!r}")
