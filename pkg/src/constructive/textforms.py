"""Text forms shared by scenario files and machine reports."""
from __future__ import annotations

import re
from typing import Callable

from . import specker as spk
from .cfunc import CFunc, LocalityOracle, parse_func
from .errors import ParseError
from .exact import RatInterval, parse_rational
from .topology import OpenSet

_PAIR_RE = re.compile(r"\(\s*([^(),]+?)\s*,\s*([^(),]+?)\s*\)")
_INTERVAL_RE = re.compile(r"\[\s*([^\[\],]+?)\s*,\s*([^\[\],]+?)\s*\]\Z")


def parse_pairs(text: str) -> list[tuple[str, str]]:
    """``[(a, b), (c, d)]`` into string pairs."""
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError(f"expected a bracketed list, got {text!r}")
    body = text[1:-1].strip()
    if not body:
        return []
    pairs, pos = [], 0
    while pos < len(body):
        m = _PAIR_RE.match(body, pos)
        if not m:
            raise ParseError(f"bad pair list near {body[pos:]!r}")
        pairs.append((m.group(1), m.group(2)))
        pos = m.end()
        rest = body[pos:].lstrip()
        if rest.startswith(","):
            pos = len(body) - len(rest) + 1
            while pos < len(body) and body[pos].isspace():
                pos += 1
        elif rest:
            raise ParseError(f"expected ',' in pair list near {rest!r}")
        else:
            break
    return pairs


def parse_interval(text: str) -> RatInterval:
    m = _INTERVAL_RE.match(text.strip())
    if not m:
        raise ParseError(f"expected [lo, hi], got {text!r}")
    lo, hi = parse_rational(m.group(1)), parse_rational(m.group(2))
    if lo > hi:
        raise ParseError(f"inverted interval {text!r}")
    return RatInterval(lo, hi)


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_source(text: str, name: str | None = None) -> spk.HaltingSource:
    text = text.strip()
    if text == "empty":
        return spk.empty_source()
    if text == "collatz":
        return spk.collatz_source()
    if text.startswith("table"):
        pairs = parse_pairs(text[len("table"):])
        try:
            entries = [(int(i), int(n)) for i, n in pairs]
        except ValueError:
            raise ParseError(f"table entries must be integers: {text!r}") from None
        return spk.table_source(entries, name or "table")
    raise ParseError(f"unknown source {text!r} (expected empty, collatz or table [...])")


def parse_oracle(text: str) -> LocalityOracle:
    text = text.strip()
    m = re.fullmatch(r"radius\s+const\s+(\S+)", text)
    if m:
        return LocalityOracle(radius=parse_rational(m.group(1)))
    m = re.fullmatch(r"radius\s+table\s+(\[.*\])", text)
    if m:
        return LocalityOracle(table=[(parse_rational(c), parse_rational(r)) for c, r in parse_pairs(m.group(1))])
    raise ParseError(f"expected 'radius const r' or 'radius table [...]', got {text!r}")


def parse_openset(text: str, resolve_specker: Callable[[str], spk.SpeckerStream] | None = None, name: str = "") -> OpenSet:
    result = None
    for part in _split_top(text, "+"):
        if part.startswith("balls"):
            pairs = parse_pairs(part[len("balls"):])
            if not pairs:
                raise ParseError("an open set needs at least one ball")
            piece = OpenSet.balls([(parse_rational(c), parse_rational(r)) for c, r in pairs])
        else:
            m = re.fullmatch(r"(halfline_below|halfline_above|specker_A)\s*\((.*)\)", part)
            if not m:
                raise ParseError(f"unknown open set form {part!r}")
            kind, args = m.groups()
            if kind == "specker_A":
                arg = args.strip()
                if resolve_specker is not None and re.fullmatch(r"[A-Za-z_]\w*", arg) and arg not in ("empty", "collatz"):
                    stream = resolve_specker(arg)
                else:
                    stream = spk.SpeckerStream(parse_source(arg))
                piece = spk.a_as_openset(stream)
                piece.spec = f"specker_A({stream.source.spec})"
            else:
                t, step = _split_top(args, ",")
                ctor = OpenSet.halfline_below if kind == "halfline_below" else OpenSet.halfline_above
                piece = ctor(parse_rational(t), parse_rational(step))
        result = piece if result is None else result.union(piece)
    result.name = name
    return result


def parse_function(text: str) -> CFunc:
    m = re.fullmatch(r"(.*?)\s+on\s+(\[.*\])", text.strip())
    if not m:
        raise ParseError(f"expected '<expr> on [lo, hi]', got {text!r}")
    return CFunc(parse_func(m.group(1)), parse_interval(m.group(2)))
