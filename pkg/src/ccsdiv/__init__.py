"""Basic CCS with recursion and (rooted) divergence-preserving branching bisimilarity."""
from .syntax import (
    NIL, TAU, Choice, Expr, Nil, ParseError, Prefix, Rec, Var,
    alpha_equivalent, canonical, exposed, free_vars, is_closed, is_x_closed,
    parse, pretty, substitute,
)
from .lts import Lts, LassoCapExceeded, quotient, simple_lassos, tau_closure, diverges_within
from .semantics import ResourceLimitError, build_lts, reachable, transitions
from .equivalence import (
    Partition, Relation, Verdict,
    branching_bisim, check_dpbb, check_open_dpbb, check_open_rooted, check_rooted,
    fresh_depth, gfp_dpbb, refine_dpbb, stuttering_check, verify_relation,
)

__version__ = "0.1.0"

__all__ = [
    "NIL",
    "TAU",
    "Choice",
    "Expr",
    "Nil",
    "ParseError",
    "Prefix",
    "Rec",
    "Var",
    "alpha_equivalent",
    "canonical",
    "exposed",
    "free_vars",
    "is_closed",
    "is_x_closed",
    "parse",
    "pretty",
    "substitute",
    "Lts",
    "LassoCapExceeded",
    "quotient",
    "simple_lassos",
    "tau_closure",
    "diverges_within",
    "ResourceLimitError",
    "build_lts",
    "reachable",
    "transitions",
    "Partition",
    "Relation",
    "Verdict",
    "branching_bisim",
    "check_dpbb",
    "check_open_dpbb",
    "check_open_rooted",
    "check_rooted",
    "fresh_depth",
    "gfp_dpbb",
    "refine_dpbb",
    "stuttering_check",
    "verify_relation",
]
