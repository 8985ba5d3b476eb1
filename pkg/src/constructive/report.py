"""Line-oriented reports and independent re-verification of their witnesses.

Machine format, one ``key: value`` per line::

    report 1
    command: find-distinct f fuel=64
    outcome: found
    fuel_spent: 3
    witness distinct-value
      function: x
      ...
    end

Every rational is written exactly as ``p/q``.  :func:`verify_text` rebuilds
each witness from its own fields and re-checks it by exact arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cfunc import CFunc, expr_creal, parse_func
from .creal import ApartnessWitness, embed, round_decimal
from .errors import ConstructiveError, ParseError
from .exact import RatInterval, format_rational, parse_rational
from .refuter import LocalityContradiction
from .specker import BelowTermWitness, SpeckerStream, specker_formula
from .textforms import parse_interval, parse_openset, parse_oracle, parse_source
from .topology import MembershipCert, Overlap
from .witness import DistinctValueWitness


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    return str(value)


@dataclass
class Block:
    kind: str
    fields: list[tuple[str, str]] = field(default_factory=list)

    def add(self, key: str, value) -> None:
        self.fields.append((key, _fmt(value)))

    def get(self, key: str) -> str:
        for k, v in self.fields:
            if k == key:
                return v
        raise KeyError(key)

    def rational(self, key: str) -> Fraction:
        return parse_rational(self.get(key))

    def integer(self, key: str) -> int:
        return int(self.get(key))


@dataclass
class Report:
    command: str
    outcome: str
    fuel_spent: int
    fields: list[tuple[str, str]] = field(default_factory=list)
    blocks: list[Block] = field(default_factory=list)

    def add(self, key: str, value) -> None:
        self.fields.append((key, _fmt(value)))


def apartness_fields(b: Block, w: ApartnessWitness, prefix: str = "") -> None:
    b.add(prefix + "precision", w.precision)
    b.add(prefix + "left_approx", w.left_approx)
    b.add(prefix + "right_approx", w.right_approx)
    b.add(prefix + "gap_lower_bound", w.gap_lower_bound)


def membership_fields(b: Block, cert, prefix: str = "") -> None:
    b.add(prefix + "ball_index", cert.ball_index)
    b.add(prefix + "center", cert.center)
    b.add(prefix + "radius", cert.radius)
    b.add(prefix + "precision", cert.precision)
    b.add(prefix + "approx", cert.approx)
    b.add(prefix + "margin", cert.margin)


# -- rendering ---------------------------------------------------------------

def _preview(value: str, decimals: int) -> str:
    try:
        q = parse_rational(value)
    except ParseError:
        return value
    if q.denominator == 1:
        return value
    return f"{value} (~{round_decimal(q, decimals)})"


def render_machine(reports: list[Report]) -> str:
    lines = []
    for i, rep in enumerate(reports, start=1):
        lines.append(f"report {i}")
        lines.append(f"command: {rep.command}")
        lines.append(f"outcome: {rep.outcome}")
        lines.append(f"fuel_spent: {rep.fuel_spent}")
        lines.extend(f"{k}: {v}" for k, v in rep.fields)
        for b in rep.blocks:
            lines.append(f"witness {b.kind}")
            lines.extend(f"  {k}: {v}" for k, v in b.fields)
            lines.append("end")
    return "\n".join(lines) + ("\n" if lines else "")


def render_human(reports: list[Report], decimals: int = 6) -> str:
    lines = []
    for rep in reports:
        lines.append(f"> {rep.command}")
        lines.append(f"  outcome: {rep.outcome} (fuel spent {rep.fuel_spent})")
        for k, v in rep.fields:
            lines.append(f"  {k}: {_preview(v, decimals)}")
        for b in rep.blocks:
            lines.append(f"  {b.kind} witness:")
            for k, v in b.fields:
                lines.append(f"    {k}: {_preview(v, decimals)}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_machine(text: str) -> list[Report]:
    reports: list[Report] = []
    block: Block | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        if raw.startswith("report "):
            if block is not None:
                raise ParseError("unterminated witness block", lineno)
            reports.append(Report("", "", 0))
            continue
        if not reports:
            raise ParseError("content before the first 'report' line", lineno)
        rep = reports[-1]
        if raw.startswith("witness "):
            if block is not None:
                raise ParseError("nested witness block", lineno)
            block = Block(raw[len("witness "):].strip())
            continue
        if raw.strip() == "end":
            if block is None:
                raise ParseError("'end' without a witness block", lineno)
            rep.blocks.append(block)
            block = None
            continue
        key, sep, value = raw.strip().partition(": ")
        if not sep:
            key, sep, value = raw.strip().partition(":")
            if not sep:
                raise ParseError(f"expected 'key: value', got {raw.strip()!r}", lineno)
        value = value.strip()
        if block is not None:
            block.fields.append((key, value))
        elif key == "command":
            rep.command = value
        elif key == "outcome":
            rep.outcome = value
        elif key == "fuel_spent":
            try:
                rep.fuel_spent = int(value)
            except ValueError:
                raise ParseError(f"bad fuel_spent {value!r}", lineno) from None
        else:
            rep.fields.append((key, value))
    if block is not None:
        raise ParseError("unterminated witness block at end of input")
    return reports


# -- verification ------------------------------------------------------------

def _apartness(b: Block, prefix: str = "") -> ApartnessWitness:
    return ApartnessWitness(
        b.integer(prefix + "precision"),
        b.rational(prefix + "left_approx"),
        b.rational(prefix + "right_approx"),
        b.rational(prefix + "gap_lower_bound"),
    )


def _membership(b: Block, prefix: str = ""):
    return MembershipCert(
        b.integer(prefix + "ball_index"),
        b.rational(prefix + "center"),
        b.rational(prefix + "radius"),
        b.integer(prefix + "precision"),
        b.rational(prefix + "approx"),
        b.rational(prefix + "margin"),
    )


def _function(b: Block):
    return CFunc(parse_func(b.get("function")), parse_interval(b.get("domain")))


def _check_apartness(b: Block) -> bool:
    w = _apartness(b)
    return w.check(expr_creal(parse_func(b.get("left"))), expr_creal(parse_func(b.get("right"))))


def _check_distinct(b: Block) -> bool:
    f = _function(b)
    return DistinctValueWitness(b.rational("p"), b.rational("q"), _apartness(b)).check(f)


def _check_locality(b: Block) -> bool:
    f = _function(b)
    oracle = parse_oracle(b.get("oracle"))
    I = RatInterval(b.rational("lo"), b.rational("hi"))
    k = b.integer("stage")
    if I.width * (1 << k) != b.rational("initial_width"):
        return False
    c = LocalityContradiction(b.rational("center"), b.integer("center_precision"), b.rational("radius"), k, I, _apartness(b), ())
    return c.check(f, oracle)


def _check_membership(b: Block) -> bool:
    S = parse_openset(b.get("set"))
    return _membership(b).check(S, embed(b.rational("point")))


def _check_overlap(b: Block) -> bool:
    A, B = parse_openset(b.get("set_a")), parse_openset(b.get("set_b"))
    return Overlap(b.rational("point"), _membership(b, "a."), _membership(b, "b.")).check(A, B)


def _check_below(b: Block) -> bool:
    stream = SpeckerStream(parse_source(b.get("source")))
    point = b.rational("limit" if b.kind == "closure" else "point")
    n = b.integer("n")
    w = BelowTermWitness(n, b.rational("approx"), b.rational("margin"))
    return stream.term(n) == b.rational("term") and w.check(stream, embed(point))


def _check_term(b: Block) -> bool:
    source = parse_source(b.get("source"))
    k = b.integer("k")
    return specker_formula(source.stage(k), k) == b.rational("value")


def _check_modulus(b: Block) -> bool:
    source = parse_source(b.get("source"))
    n, N = b.integer("precision"), b.integer("stage")
    return N >= n and set(range(n + 1)) <= source.stage(N)


_CHECKS = {
    "apartness": _check_apartness,
    "distinct-value": _check_distinct,
    "locality-contradiction": _check_locality,
    "membership": _check_membership,
    "overlap": _check_overlap,
    "in-A": _check_below,
    "not-in-B": _check_below,
    "closure": _check_below,
    "term": _check_term,
    "modulus": _check_modulus,
}


@dataclass(frozen=True)
class VerifyResult:
    report: int
    command: str
    kind: str
    passed: bool
    reason: str = ""


def verify_reports(reports: list[Report]) -> list[VerifyResult]:
    results = []
    for i, rep in enumerate(reports, start=1):
        for b in rep.blocks:
            check = _CHECKS.get(b.kind)
            if check is None:
                results.append(VerifyResult(i, rep.command, b.kind, False, "unknown witness kind"))
                continue
            try:
                ok = check(b)
                reason = "" if ok else "certificate does not re-check"
            except KeyError as exc:
                ok, reason = False, f"missing field {exc.args[0]}"
            except (ConstructiveError, ValueError, ZeroDivisionError) as exc:
                ok, reason = False, str(exc)
            results.append(VerifyResult(i, rep.command, b.kind, ok, reason))
    return results


def verify_text(text: str) -> list[VerifyResult]:
    """Parse a machine report and re-check every witness.  Raises ParseError if malformed."""
    return verify_reports(parse_machine(text))

