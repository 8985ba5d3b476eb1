"""Scenario files: declarations plus commands, executed into reports.

One statement per line, ``#`` starts a comment::

    fn f = x*x + -1/2 on [0, 1]
    oracle o = radius const 1/10
    oracle t = radius table [(0, 1/4), (1, 1/8)]
    openset A = balls [(0, 3/10), (3/10, 3/10)] + halfline_below(3/5, 1/10)
    source S = collatz            # or: empty | table [(0, 2), (3, 5)]
    specker K from S

    find-distinct f fuel=64
    refute-local f o fuel=64 depth=64
    member A 1/4 fuel=128
    classify A B on [0, 1] count=8 slice=128
    refute-partition A B on [0, 1] fuel=16384 slice=128
    apart 1/3 vs 1/3 + 1/1048576 fuel=30
    eval f at 1/2 prec 20
    term K 5
    inA K 1/4 fuel=512
    refuteB K 1/4 fuel=512
    closure K limit=1/2 seq=[(1/4, 2), (3/8, 3)] fuel=512 slice=512
    modulus K 3 fuel=512
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import specker as spk
from .cfunc import CFunc, LocalityOracle, eval_at, expr_creal, parse_func, to_text
from .creal import apart, embed
from .errors import ConstructiveError, ParseError
from .exact import RatInterval, format_rational, parse_rational
from .refuter import DEFAULT_MAX_DEPTH, refute_locality
from .report import Block, Report, apartness_fields, membership_fields
from .textforms import (
    parse_function,
    parse_interval,
    parse_oracle,
    parse_openset,
    parse_pairs,
    parse_source,
)
from .topology import (
    DEFAULT_PARTITION_FUEL,
    DEFAULT_SLICE,
    CoverageGapSuspect,
    OpenSet,
    classify_rationals,
    member,
    refute_partition,
)
from .witness import find_distinct

DEFAULT_FIND_FUEL = 256


@dataclass
class Defaults:
    find_fuel: int = DEFAULT_FIND_FUEL
    member_fuel: int = DEFAULT_SLICE
    slice: int = DEFAULT_SLICE
    partition_fuel: int = DEFAULT_PARTITION_FUEL
    depth: int = DEFAULT_MAX_DEPTH
    specker_fuel: int = spk.DEFAULT_SPECKER_FUEL
    count: int = 8

    def override_fuel(self, fuel: int) -> None:
        self.find_fuel = self.member_fuel = self.partition_fuel = self.specker_fuel = fuel


# -- statements --------------------------------------------------------------

_OPTION_RE = re.compile(r"\s([a-z_]+)=")


def split_options(text: str) -> tuple[str, dict[str, str]]:
    matches = list(_OPTION_RE.finditer(" " + text))
    if not matches:
        return text.strip(), {}
    head = (" " + text)[: matches[0].start()].strip()
    opts = {}
    for m, nxt in zip(matches, matches[1:] + [None]):
        end = nxt.start() if nxt is not None else len(text) + 1
        opts[m.group(1)] = (" " + text)[m.end():end].strip()
    return head, opts


@dataclass
class Statement:
    line: int
    text: str


@dataclass
class Scenario:
    functions: dict[str, CFunc] = field(default_factory=dict)
    oracles: dict[str, LocalityOracle] = field(default_factory=dict)
    opensets: dict[str, OpenSet] = field(default_factory=dict)
    sources: dict[str, spk.HaltingSource] = field(default_factory=dict)
    streams: dict[str, spk.SpeckerStream] = field(default_factory=dict)
    commands: list[Statement] = field(default_factory=list)

    def names(self) -> set[str]:
        return set(self.functions) | set(self.oracles) | set(self.opensets) | set(self.sources) | set(self.streams)


_DECL_RE = re.compile(r"(fn|oracle|openset|source)\s+([A-Za-z_]\w*)\s*=\s*(.+)\Z")
_SPECKER_RE = re.compile(r"specker\s+([A-Za-z_]\w*)\s+from\s+([A-Za-z_]\w*)\Z")
COMMANDS = (
    "find-distinct", "refute-local", "member", "classify", "refute-partition",
    "apart", "eval", "term", "inA", "refuteB", "closure", "modulus",
)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_scenario(text: str) -> Scenario:
    sc = Scenario()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        lead = raw.find(line)
        try:
            _parse_statement(sc, line, lineno)
        except ParseError as exc:
            raise exc.at(lineno, lead) from None
        except (ValueError, ConstructiveError) as exc:
            raise ParseError(str(exc), lineno, lead + 1) from None
    return sc


def _parse_statement(sc: Scenario, line: str, lineno: int) -> None:
    m = _SPECKER_RE.fullmatch(line)
    if m:
        name, src = m.groups()
        if name in sc.names():
            raise ParseError(f"duplicate name {name!r}")
        if src not in sc.sources:
            raise ParseError(f"unknown source {src!r}")
        sc.streams[name] = spk.SpeckerStream(sc.sources[src], name)
        return
    m = _DECL_RE.fullmatch(line)
    if m:
        kind, name, body = m.groups()
        if name in sc.names():
            raise ParseError(f"duplicate name {name!r}")
        try:
            _declare(sc, kind, name, body)
        except ParseError as exc:
            raise exc.at(1, m.start(3)) from None
        return
    word = line.split(None, 1)[0]
    if word not in COMMANDS:
        raise ParseError(f"unknown statement {word!r}")
    _check_refs(sc, line)
    sc.commands.append(Statement(lineno, line))


def _declare(sc: Scenario, kind: str, name: str, body: str) -> None:
    if kind == "fn":
        sc.functions[name] = parse_function(body)
    elif kind == "oracle":
        sc.oracles[name] = parse_oracle(body)
    elif kind == "openset":
        sc.opensets[name] = parse_openset(body, lambda n: _lookup(sc.streams, n, "specker stream"), name)
    else:
        sc.sources[name] = parse_source(body, name)


def _lookup(table: dict, name: str, what: str):
    try:
        return table[name]
    except KeyError:
        raise ParseError(f"unknown {what} {name!r}") from None


_REFS = {
    "find-distinct": ["functions"],
    "refute-local": ["functions", "oracles"],
    "member": ["opensets"],
    "classify": ["opensets", "opensets"],
    "refute-partition": ["opensets", "opensets"],
    "eval": ["functions"],
    "term": ["streams"],
    "inA": ["streams"],
    "refuteB": ["streams"],
    "closure": ["streams"],
    "modulus": ["streams"],
}


def _check_refs(sc: Scenario, line: str) -> None:
    words = line.split()
    kinds = _REFS.get(words[0], [])
    if len(words) - 1 < len(kinds):
        raise ParseError(f"{words[0]} needs {len(kinds)} name(s)")
    for name, kind in zip(words[1:], kinds):
        _lookup(getattr(sc, kind), name, kind.rstrip("s").replace("openset", "open set"))


# -- execution ---------------------------------------------------------------

def _int_opt(opts: dict, key: str, default: int) -> int:
    if key not in opts:
        return default
    try:
        value = int(opts[key])
    except ValueError:
        raise ParseError(f"{key} must be an integer, got {opts[key]!r}") from None
    if value < 0:
        raise ParseError(f"{key} must be >= 0")
    return value


def _reject_unknown(opts: dict, allowed: set[str]) -> None:
    extra = set(opts) - allowed
    if extra:
        raise ParseError(f"unknown option(s): {', '.join(sorted(extra))}")


def run_command(sc: Scenario, stmt: Statement, defaults: Defaults) -> Report:
    head, opts = split_options(stmt.text)
    words = head.split()
    cmd, args = words[0], words[1:]
    handler = _HANDLERS[cmd]
    return handler(sc, stmt.text, args, head, opts, defaults)


def _cmd_find_distinct(sc, text, args, head, opts, d):
    _reject_unknown(opts, {"fuel"})
    f = sc.functions[args[0]]
    fuel = _int_opt(opts, "fuel", d.find_fuel)
    out = find_distinct(f, fuel)
    rep = Report(text, "found" if out.found else "exhausted", out.fuel_spent)
    if out.found:
        w = out.witness
        b = Block("distinct-value")
        b.add("function", to_text(f.expr))
        b.add("domain", str(f.domain))
        b.add("p", w.p)
        b.add("q", w.q)
        apartness_fields(b, w.value_witness)
        rep.blocks.append(b)
    return rep


def _cmd_refute_local(sc, text, args, head, opts, d):
    _reject_unknown(opts, {"fuel", "depth"})
    f, oracle = sc.functions[args[0]], sc.oracles[args[1]]
    fuel = _int_opt(opts, "fuel", d.find_fuel)
    depth = _int_opt(opts, "depth", d.depth)
    out = refute_locality(f, oracle, fuel, depth)
    rep = Report(text, "found" if out.found else "exhausted", out.fuel_spent)
    if out.found:
        c = out.witness
        for k, st in enumerate(c.stages):
            side = st.side_choice or "initial"
            rep.add(f"stage.{k}", f"{st.interval} width={format_rational(st.interval.width)} gap_bound={format_rational(st.gap_bound)} side={side}")
        b = Block("locality-contradiction")
        b.add("function", to_text(f.expr))
        b.add("domain", str(f.domain))
        b.add("oracle", str(oracle))
        b.add("center", c.center)
        b.add("center_precision", c.center_precision)
        b.add("radius", c.claimed_radius)
        b.add("stage", c.inner_stage)
        b.add("initial_width", c.stages[0].interval.width)
        b.add("lo", c.interval.lo)
        b.add("hi", c.interval.hi)
        apartness_fields(b, c.endpoint_gap)
        rep.blocks.append(b)
    return rep


def _cmd_member(sc, text, args, head, opts, d):
    _reject_unknown(opts, {"fuel"})
    if len(args) != 2:
        raise ParseError("usage: member SET POINT [fuel=N]")
    S, x = sc.opensets[args[0]], parse_rational(args[1])
    out = member(S, embed(x), _int_opt(opts, "fuel", d.member_fuel))
    rep = Report(text, "found" if out.found else "exhausted", out.fuel_spent)
    if out.found:
        b = Block("membership")
        b.add("set", S.spec)
        b.add("point", x)
        membership_fields(b, out.witness)
        rep.blocks.append(b)
    return rep


def _bounds_arg(head: str) -> RatInterval:
    m = re.search(r"\son\s+(\[.*\])\s*\Z", head)
    if not m:
        raise ParseError("expected 'on [lo, hi]'")
    return parse_interval(m.group(1))


def _cmd_classify(sc, text, args, head, opts, d):
    _reject_unknown(opts, {"count", "slice"})
    A, B = sc.opensets[args[0]], sc.opensets[args[1]]
    bounds = _bounds_arg(head)
    rows = classify_rationals(A, B, bounds, _int_opt(opts, "count", d.count), _int_opt(opts, "slice", d.slice))
    rep = Report(text, "value", 0)
    for i, (pt, label) in enumerate(rows):
        rep.add(f"point.{i}", f"{format_rational(pt)} {label}")
    return rep


def _cmd_refute_partition(sc, text, args, head, opts, d):
    _reject_unknown(opts, {"fuel", "slice"})
    A, B = sc.opensets[args[0]], sc.opensets[args[1]]
    bounds = _bounds_arg(head)
    out = refute_partition(A, B, bounds, _int_opt(opts, "fuel", d.partition_fuel), _int_opt(opts, "slice", d.slice))
    if not out.found:
        return Report(text, "exhausted", out.fuel_spent)
    v = out.witness
    if isinstance(v, CoverageGapSuspect):
        rep = Report(text, "suspect", out.fuel_spent)
        rep.add("suspect_point", v.point)
        rep.add("note", "coverage gap suspected; not a proof")
        return rep
    rep = Report(text, "found", out.fuel_spent)
    b = Block("overlap")
    b.add("set_a", A.spec)
    b.add("set_b", B.spec)
    b.add("point", v.point)
    membership_fields(b, v.cert_a, "a.")
    membership_fields(b, v.cert_b, "b.")
    rep.blocks.append(b)
    return rep


def _cmd_apart(sc, text, args, head, opts, d):
    _reject_unknown(opts, {"fuel"})
    body = head[len("apart"):]
    parts = re.split(r"\s+vs\s+", body.strip())
    if len(parts) != 2:
        raise ParseError("usage: apart EXPR vs EXPR [fuel=N]")
    left, right = parse_func(parts[0]), parse_func(parts[1])
    out = apart(expr_creal(left), expr_creal(right), _int_opt(opts, "fuel", d.find_fuel))
    rep = Report(text, "found" if out.found else "exhausted", out.fuel_spent)
    if out.found:
        b = Block("apartness")
        b.add("left", to_text(left))
        b.add("right", to_text(right))
        apartness_fields(b, out.witness)
        rep.blocks.append(b)
    return rep


def _cmd_eval(sc, text, args, head, opts, d):
    _reject_unknown(opts, set())
    if len(args) != 5 or args[1] != "at" or args[3] != "prec":
        raise ParseError("usage: eval FN at POINT prec N")
    f = sc.functions[args[0]]
    x = parse_rational(args[2])
    n = _int_opt({"prec": args[4]}, "prec", 0)
    return eval_report(text, f, x, n)


def eval_report(text: str, f: CFunc, x: Fraction, n: int) -> Report:
    value = eval_at(f, embed(x)).approx(n)
    rep = Report(text, "value", 0)
    rep.add("precision", n)
    rep.add("value", value)
    return rep


def _cmd_term(sc, text, args, head, opts, d):
    _reject_unknown(opts, set())
    if len(args) != 2:
        raise ParseError("usage: term SPECKER K")
    stream = sc.streams[args[0]]
    k = _int_opt({"k": args[1]}, "k", 0)
    return term_report(text, stream, k)


def term_report(text: str, stream: spk.SpeckerStream, k: int) -> Report:
    rep = Report(text, "value", 0)
    b = Block("term")
    b.add("source", stream.source.spec)
    b.add("k", k)
    b.add("value", stream.term(k))
    rep.blocks.append(b)
    return rep


def _below_block(kind: str, stream, label: str, x, w) -> Block:
    b = Block(kind)
    b.add("source", stream.source.spec)
    b.add(label, x)
    b.add("n", w.n)
    b.add("approx", w.approx)
    b.add("margin", w.margin)
    b.add("term", stream.term(w.n))
    return b


def _cmd_in_a(sc, text, args, head, opts, d, kind="in-A", search=spk.in_A):
    _reject_unknown(opts, {"fuel"})
    if len(args) != 2:
        raise ParseError(f"usage: {args and text.split()[0]} SPECKER POINT [fuel=N]")
    stream, x = sc.streams[args[0]], parse_rational(args[1])
    out = search(stream, embed(x), _int_opt(opts, "fuel", d.specker_fuel))
    rep = Report(text, "found" if out.found else "exhausted", out.fuel_spent)
    if out.found:
        rep.blocks.append(_below_block(kind, stream, "point", x, out.witness))
    return rep


def _cmd_refute_b(sc, text, args, head, opts, d):
    return _cmd_in_a(sc, text, args, head, opts, d, kind="not-in-B", search=spk.refute_in_B)


def _cmd_closure(sc, text, args, head, opts, d):
    _reject_unknown(opts, {"fuel", "slice", "limit", "seq"})
    stream = sc.streams[args[0]]
    if "limit" not in opts or "seq" not in opts:
        raise ParseError("usage: closure SPECKER limit=Q seq=[(p, k), ...] [fuel=N] [slice=N]")
    limit = parse_rational(opts["limit"])
    try:
        seq = [(parse_rational(p), int(k)) for p, k in parse_pairs(opts["seq"])]
    except ValueError:
        raise ParseError("seq indices must be integers") from None
    out = spk.closure_search(stream, seq, embed(limit), _int_opt(opts, "fuel", d.specker_fuel), _int_opt(opts, "slice", d.specker_fuel))
    rep = Report(text, "found" if out.found else "exhausted", out.fuel_spent)
    if out.found:
        rep.blocks.append(_below_block("closure", stream, "limit", limit, out.witness))
    return rep


def _cmd_modulus(sc, text, args, head, opts, d):
    _reject_unknown(opts, {"fuel"})
    if len(args) != 2:
        raise ParseError("usage: modulus SPECKER N [fuel=N]")
    stream = sc.streams[args[0]]
    n = _int_opt({"n": args[1]}, "n", 0)
    out = spk.modulus_search(stream, n, _int_opt(opts, "fuel", d.specker_fuel))
    rep = Report(text, "found" if out.found else "exhausted", out.fuel_spent)
    if out.found:
        b = Block("modulus")
        b.add("source", stream.source.spec)
        b.add("precision", n)
        b.add("stage", out.witness)
        rep.blocks.append(b)
    return rep


_HANDLERS = {
    "find-distinct": _cmd_find_distinct,
    "refute-local": _cmd_refute_local,
    "member": _cmd_member,
    "classify": _cmd_classify,
    "refute-partition": _cmd_refute_partition,
    "apart": _cmd_apart,
    "eval": _cmd_eval,
    "term": _cmd_term,
    "inA": _cmd_in_a,
    "refuteB": _cmd_refute_b,
    "closure": _cmd_closure,
    "modulus": _cmd_modulus,
}


class CommandError(Exception):
    def __init__(self, stmt: Statement, cause: Exception):
        self.stmt = stmt
        self.cause = cause
        super().__init__(f"line {stmt.line}: {stmt.text}: {cause}")


def run_scenario_text(text: str, defaults: Defaults | None = None) -> list[Report]:
    """Parse and run every command in order.  Errors stop the run as :class:`CommandError`."""
    defaults = defaults or Defaults()
    sc = parse_scenario(text)
    reports = []
    for stmt in sc.commands:
        try:
            reports.append(run_command(sc, stmt, defaults))
        except (ConstructiveError, ValueError) as exc:
            raise CommandError(stmt, exc) from exc
    return reports
