"""Command-line front end.

Exit codes: 0 success (exhausted searches included), 1 usage, parse or
command errors, 2 witness verification failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cfunc import CFunc, parse_func
from .errors import ConstructiveError, ParseError
from .exact import RatInterval, parse_rational
from .report import render_human, render_machine, verify_text
from .scenario import CommandError, Defaults, eval_report, run_scenario_text, term_report
from .specker import SpeckerStream
from .textforms import parse_source

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, help="replace every default fuel budget")
    common.add_argument("--depth", type=int, help="default bisection depth for refute-local")
    common.add_argument("--machine", action="store_true", help="emit the machine-readable report format")
    common.add_argument("--decimals", type=int, default=6, help="digits in decimal previews")

    parser = argparse.ArgumentParser(prog="constructive", description="Exact real arithmetic and constructive refuters.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a scenario file")
    p.add_argument("file", type=Path)

    p = sub.add_parser("verify", parents=[common], help="re-check every witness in a machine report")
    p.add_argument("file", type=Path)

    p = sub.add_parser("eval", parents=[common], help="eval EXPR at POINT prec N")
    p.add_argument("expr")
    p.add_argument("at", choices=["at"])
    p.add_argument("point")
    p.add_argument("prec", choices=["prec"])
    p.add_argument("n", type=int)

    p = sub.add_parser("specker", parents=[common], help="specker SOURCE term K")
    p.add_argument("source", help="empty, collatz or 'table [(i, n), ...]'")
    p.add_argument("term", choices=["term"])
    p.add_argument("k", type=int)
    return parser


def _emit(reports, args) -> None:
    if args.machine:
        sys.stdout.write(render_machine(reports))
    else:
        sys.stdout.write(render_human(reports, args.decimals))


def _run(args) -> int:
    defaults = Defaults()
    if args.fuel is not None:
        defaults.override_fuel(args.fuel)
    if args.depth is not None:
        defaults.depth = args.depth
    try:
        text = args.file.read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        reports = run_scenario_text(text, defaults)
    except ParseError as exc:
        print(f"{args.file}:{exc.line}:{exc.column}: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except CommandError as exc:
        print(f"{args.file}:{exc.stmt.line}: error in '{exc.stmt.text}': {exc.cause}", file=sys.stderr)
        return EXIT_USAGE
    _emit(reports, args)
    return EXIT_OK


def _verify(args) -> int:
    try:
        results = verify_text(args.file.read_text())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"{args.file}:{exc.line}: malformed report: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    failed = 0
    for r in results:
        status = "pass" if r.passed else "FAIL"
        detail = f" ({r.reason})" if r.reason else ""
        print(f"{status} report {r.report} {r.kind}: {r.command}{detail}")
        failed += not r.passed
    print(f"{len(results) - failed}/{len(results)} witnesses verified")
    return EXIT_VERIFY if failed else EXIT_OK


def _eval(args) -> int:
    point = parse_rational(args.point)
    f = CFunc(parse_func(args.expr), RatInterval.point(point))
    _emit([eval_report(f"eval {args.expr} at {args.point} prec {args.n}", f, point, args.n)], args)
    return EXIT_OK


def _specker(args) -> int:
    stream = SpeckerStream(parse_source(args.source))
    _emit([term_report(f"specker {args.source} term {args.k}", stream, args.k)], args)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"run": _run, "verify": _verify, "eval": _eval, "specker": _specker}[args.command]
    try:
        return handler(args)
    except (ConstructiveError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
