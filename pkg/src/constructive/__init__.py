"""Exact computable reals and executable constructive refutations."""
from .cfunc import CFunc, LocalityOracle, eval_at, eval_interval, parse_func, to_text
from .creal import (
    ApartnessWitness,
    CReal,
    Exhausted,
    Found,
    Fuel,
    apart,
    creal_arith,
    embed,
    limit_of_nested,
    locate,
    render,
)
from .exact import RatInterval, interval_ops, rat, rat_arith
from .refuter import bisect_run, refute_locality
from .specker import SpeckerStream, builtin_sources, closure_search, in_A, refute_in_B, specker_term
from .topology import OpenSet, classify_rationals, member, refute_partition
from .witness import find_distinct

__version__ = "0.1.0"

__all__ = [
    "ApartnessWitness", "CFunc", "CReal", "Exhausted", "Found", "Fuel", "LocalityOracle", "OpenSet",
    "RatInterval", "SpeckerStream", "apart", "bisect_run", "builtin_sources", "classify_rationals",
    "closure_search", "creal_arith", "embed", "eval_at", "eval_interval", "find_distinct", "in_A",
    "interval_ops", "limit_of_nested", "locate", "member", "parse_func", "rat", "rat_arith",
    "refute_in_B", "refute_locality", "refute_partition", "render", "specker_term", "to_text",
]
