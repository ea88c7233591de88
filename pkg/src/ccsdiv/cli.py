"""ccsdiv command-line front end.

Exit status: 0 equivalent / ok, 1 inequivalent / violation, 2 usage error,
3 resource cap hit.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .equivalence import (
    CONDITIONS,
    NotClosedError,
    NotEquivalenceError,
    Relation,
    check_branching,
    check_dpbb,
    check_open_dpbb,
    check_open_rooted,
    check_rooted,
    gfp_dpbb,
    verify_relation,
)
from .harness import GenConfig, coarsest_campaign, congruence_campaign
from .lts import LassoCapExceeded, partition_to_json, quotient, to_aut
from .semantics import ResourceLimitError, build_lts
from .syntax import ParseError, canonical, is_closed, parse, pretty
from .upto import PreconditionError, conclude_rec_congruence

OK, FAIL, USAGE, CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def read_expr(arg: str):
    """Parse an inline expression, or the contents of ``@path``."""
    text = Path(arg[1:]).read_text() if arg.startswith("@") else arg
    return parse(text)


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_fmt(args) -> int:
    print(pretty(read_expr(args.expr)))
    return OK


def cmd_lts(args) -> int:
    e = read_expr(args.expr)
    if not args.extended and not is_closed(e):
        raise UsageError(f"{pretty(e)} has free variables; pass --extended")
    l = build_lts([e], extended=args.extended)
    _write(to_aut(l), args.out)
    if args.states:
        Path(args.states).write_text(
            "".join(f"{i}\t{l.name(i)}\n" for i in range(l.n)))
    return OK


def cmd_check(args) -> int:
    p, q = read_expr(args.left), read_expr(args.right)
    if args.branching:
        if args.open:
            raise UsageError("--branching has no open-term variant")
        v = check_branching(p, q)
    elif args.open:
        fn = check_open_rooted if args.rooted else check_open_dpbb
        v = fn(p, q, args.open)
    else:
        v = (check_rooted if args.rooted else check_dpbb)(p, q)
    word = "equivalent" if v.result else "inequivalent"
    if args.json:
        d = v.to_dict()
        d["verdict"] = word
        d["left"], d["right"] = pretty(p), pretty(q)
        print(json.dumps(d, indent=2, sort_keys=True))
    else:
        print(word)
        if v.counterexample and not v.result:
            cx = v.counterexample
            print(f"  {cx['condition']} fails for ({cx['pair'][0]}, {cx['pair'][1]})")
            if cx["path"]:
                print("  path: " + " ".join(map(str, cx["path"])))
    return OK if v.result else FAIL


def cmd_minimize(args) -> int:
    e = read_expr(args.expr)
    if not is_closed(e):
        raise UsageError("minimize needs a closed expression")
    l = build_lts([e])
    part = gfp_dpbb(l)
    _write(to_aut(quotient(l, part)), args.out)
    if args.blocks:
        Path(args.blocks).write_text(partition_to_json(l, part) + "\n")
    print(f"{l.n} states -> {len(part)} blocks", file=sys.stderr)
    return OK


def _load_relation(path: str, l) -> Relation:
    raw = json.loads(Path(path).read_text())
    pairs = raw["pairs"] if isinstance(raw, dict) else raw
    out = []
    for item in pairs:
        if len(item) != 2:
            raise UsageError(f"relation entries must be pairs, got {item!r}")
        ids = []
        for s in item:
            e = canonical(parse(s))
            if e not in l.index:
                raise UsageError(f"{pretty(e)} is not a state of the given LTS")
            ids.append(l.index[e])
        out.append(tuple(ids))
    # a bare list, or {"pairs": [...], "symmetric": false} to skip the inverse
    sym = not (isinstance(raw, dict) and raw.get("symmetric") is False)
    return Relation.of(out, symmetric=sym)


def cmd_verify(args) -> int:
    roots = [read_expr(x) for x in args.exprs]
    if not all(is_closed(r) for r in roots):
        raise UsageError("verify needs closed expressions")
    l = build_lts(roots)
    rel = _load_relation(args.relation, l)
    conds = [c.strip() for c in args.conditions.split(",") if c.strip()]
    bad = [c for c in conds if c not in CONDITIONS]
    if bad:
        raise UsageError(f"unknown conditions {bad}; choose from {', '.join(CONDITIONS)}")
    v = verify_relation(rel, l, conds)
    print(v.to_json() if args.json else v.status)
    if v.result is None:
        return CAP
    return OK if v.result else FAIL


def cmd_upto(args) -> int:
    e, f = read_expr(args.left), read_expr(args.right)
    v = conclude_rec_congruence(e, f, args.var)
    print(v.to_json())
    if v.result is None:
        return CAP
    return OK if v.result else FAIL


def cmd_fuzz(args) -> int:
    c = GenConfig(max_depth=args.depth, seed=args.seed)
    run = congruence_campaign if args.congruence else coarsest_campaign
    rep = run(args.cases, c, workers=args.workers)
    text = rep.to_json(timings=args.timings)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(f"{rep.name}: {rep.n_cases} cases, {len(rep.violations)} violations")
    for v in rep.violations[:10]:
        print("  " + json.dumps(v, sort_keys=True))
    return OK if rep.ok else FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ccsdiv", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fmt", help="canonical pretty print")
    p.add_argument("expr")
    p.set_defaults(fn=cmd_fmt)

    p = sub.add_parser("lts", help="export the LTS in .aut format")
    p.add_argument("expr")
    p.add_argument("--extended", action="store_true", help="include variable transitions")
    p.add_argument("--out")
    p.add_argument("--states", help="also write a state-index to expression table")
    p.set_defaults(fn=cmd_lts)

    p = sub.add_parser("check", help="decide an equivalence")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--dpbb", action="store_true")
    g.add_argument("--rooted", action="store_true")
    g.add_argument("--branching", action="store_true")
    p.add_argument("--open", metavar="X", help="compare open terms in this variable")
    p.add_argument("--json", action="store_true")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("minimize", help="quotient modulo divergence-preserving branching bisimilarity")
    p.add_argument("expr")
    p.add_argument("--out")
    p.add_argument("--blocks", help="write the partition as JSON")
    p.set_defaults(fn=cmd_minimize)

    p = sub.add_parser("verify", help="check relational conditions on a relation")
    p.add_argument("--relation", required=True, help='JSON list of ["P", "Q"] pairs')
    p.add_argument("--conditions", default="T,Dsecond")
    p.add_argument("--json", action="store_true")
    p.add_argument("exprs", nargs="+")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("upto", help="rec X.E vs rec X.F through the up-to relation")
    p.add_argument("--var", default="X")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(fn=cmd_upto)

    p = sub.add_parser("fuzz", help="run a test campaign")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--congruence", action="store_true")
    g.add_argument("--coarsest", action="store_true")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--timings", action="store_true", help="include timings in the report")
    p.set_defaults(fn=cmd_fuzz)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.fn(args)
    except (UsageError, ParseError, NotClosedError, NotEquivalenceError,
            PreconditionError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (ResourceLimitError, LassoCapExceeded) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return CAP


if __name__ == "__main__":
    sys.exit(main())
