"""Rooted divergence-preserving branching bisimulation up to ≈Δ.

A symmetric relation ``B`` on the states of a closed LTS is checked against
three conditions phrased over ``B̂ = ≈Δ ; B ; ≈Δ``:

U1  every move ``P -a-> P'`` is answered by one move ``Q -a-> Q'`` with P' B̂ Q';
U2  every ``P => P'' -(a)-> P'`` is answered by ``Q => Q'' -(a)-> Q'`` with
    P'' B̂ Q'' and P' B̂ Q';
U3  for every infinite tau-path from P there is an infinite tau-path from Q
    all of whose states are B̂-related to some state of the former.

``build_uef`` materialises the relation pairing ``G[rec X.E/X]`` with
``G[rec X.F/X]`` over a finite universe of X-closed ``G``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .equivalence import (
    Partition,
    Relation,
    Verdict,
    _by_label,
    _cex,
    _lasso_steps,
    _steps,
    check_open_rooted,
    check_rooted,
    gfp_dpbb,
)
from .lts import LassoCapExceeded, Lts, divergent_path, mask_states, minimal_lasso_sets, tau_closure
from .semantics import build_lts
from .syntax import TAU, Expr, Rec, Var, canonical, is_x_closed, pretty, substitute


class PreconditionError(ValueError):
    pass


def _block_pairs(b: Relation, ids: Sequence[int]) -> set:
    return {(ids[p], ids[q]) for p, q in b.pairs}


def compose_closure(b: Relation, l: Lts, partition: Partition | None = None) -> Relation:
    """``≈Δ ; b ; ≈Δ`` over the states of ``l``."""
    part = partition if partition is not None else gfp_dpbb(l)
    ids = part.block_of(l.n)
    bp = _block_pairs(b, ids)
    pairs = frozenset(
        (p, q) for bp_, bq in bp for p in part.blocks[bp_] for q in part.blocks[bq]
    )
    return Relation(pairs, b.symmetric)


def verify_upto(b: Relation, l: Lts, partition: Partition | None = None,
                lasso_cap: int | None = None) -> Verdict:
    if any((q, p) not in b.pairs for p, q in b.pairs):
        raise ValueError("an up-to relation must be symmetric")
    part = partition if partition is not None else gfp_dpbb(l)
    ids = part.block_of(l.n)
    bp = _block_pairs(b, ids)
    partners: dict = {}
    for x, y in bp:
        partners.setdefault(x, set()).add(y)

    def hat(p: int, q: int) -> bool:
        return (ids[p], ids[q]) in bp

    conditions = ["U1", "U2", "U3"]
    pairs = sorted(b.pairs)
    closure = {}
    by_label = _by_label(l)

    def fail(pair, cond, path):
        return Verdict(False, conditions, _cex(l, pair, cond, path), witness=b)

    for p, q in pairs:
        for a, p1 in l.succ[p]:
            if not any(c == a and hat(p1, q1) for c, q1 in l.succ[q]):
                return fail((p, q), "U1", _steps(l, [p, a, p1]))

    answered: dict = {}
    for p, q in pairs:
        if p not in closure:
            closure[p] = tau_closure(l, p)
        if q not in closure:
            closure[q] = tau_closure(l, q)
        for p2 in sorted(closure[p]):
            moves = [(TAU, p2)] + list(l.succ[p2])
            for a, p1 in moves:
                key = (p2, a, p1, q)
                if key not in answered:
                    answered[key] = any(
                        hat(p2, q2)
                        and ((a == TAU and hat(p1, q2))
                             or any(hat(p1, q1) for q1 in by_label[q2].get(a, ())))
                        for q2 in closure[q]
                    )
                if not answered[key]:
                    path = [l.name(p)] + (["=>", l.name(p2)] if p2 != p else [])
                    return fail((p, q), "U2", path + [a, l.name(p1)])

    try:
        for p, q in pairs:
            for mask, las in minimal_lasso_sets(l, p, lasso_cap):
                blocks = set()
                for s in mask_states(mask):
                    blocks |= partners.get(ids[s], set())
                allowed = {t for t in range(l.n) if ids[t] in blocks}
                if q not in allowed or divergent_path(l, q, allowed) is None:
                    return fail((p, q), "U3", _lasso_steps(l, las))
    except LassoCapExceeded as exc:
        return Verdict(None, conditions, None, witness=b, details={"unknown": str(exc)})
    return Verdict(True, conditions, witness=b)


@dataclass
class UEF:
    e: Expr
    f: Expr
    var: str
    universe: list
    lts: Lts
    pairs: Relation
    rec_e: Expr = field(repr=False, default=None)
    rec_f: Expr = field(repr=False, default=None)

    def instances(self, g: Expr) -> tuple[int, int]:
        """Host states of ``g[rec X.e/X]`` and ``g[rec X.f/X]``."""
        left = substitute(g, {self.var: self.rec_e})
        right = substitute(g, {self.var: self.rec_f})
        return self.lts.index[left], self.lts.index[right]


def build_uef(e: Expr, f: Expr, var: str = "X", check: bool = True) -> UEF:
    e, f = canonical(e), canonical(f)
    if not (is_x_closed(e, var) and is_x_closed(f, var)):
        raise PreconditionError(f"both expressions must be {var}-closed")
    if check and not check_open_rooted(e, f, var):
        raise PreconditionError(f"{pretty(e)} and {pretty(f)} are not rooted equivalent")
    # closed under extended moves of X, e and f: every partner a pair needs
    # (lifted moves of G, or moves of e/f when X is exposed) stays inside
    seeds = build_lts([Var(var), e, f], extended=True)
    universe = list(seeds.states)
    rec_e, rec_f = canonical(Rec(var, e)), canonical(Rec(var, f))
    left = [substitute(g, {var: rec_e}) for g in universe]
    right = [substitute(g, {var: rec_f}) for g in universe]
    host = build_lts(left + right)
    idx = host.index
    pairs = Relation.of(((idx[a], idx[b]) for a, b in zip(left, right)), symmetric=True)
    return UEF(e, f, var, universe, host, pairs, rec_e, rec_f)


def conclude_rec_congruence(e: Expr, f: Expr, var: str = "X",
                            lasso_cap: int | None = None) -> Verdict:
    """Decide ``rec X.e ≃Δ rec X.f`` through the up-to relation, cross-checked
    against the direct rooted check."""
    e, f = canonical(e), canonical(f)
    if not (is_x_closed(e, var) and is_x_closed(f, var)):
        raise PreconditionError(f"both expressions must be {var}-closed")
    rec_e, rec_f = canonical(Rec(var, e)), canonical(Rec(var, f))
    direct = check_rooted(rec_e, rec_f)
    pre = check_open_rooted(e, f, var)
    details = {
        "e": pretty(e), "f": pretty(f),
        "rec_e": pretty(rec_e), "rec_f": pretty(rec_f),
        "precondition": bool(pre), "direct": direct.result,
    }
    if not pre:
        details.update(upto=None, agree=None)
        return Verdict(direct.result, ["precondition", "direct"],
                       pre.counterexample, witness=None, details=details)
    uef = build_uef(e, f, var, check=False)
    part = gfp_dpbb(uef.lts)
    up = verify_upto(uef.pairs, uef.lts, part, lasso_cap)
    host = uef.lts
    details.update(
        upto=up.status,
        agree=up.result == direct.result,
        universe=[pretty(g) for g in uef.universe],
        pairs=sorted([host.name(p), host.name(q)] for p, q in uef.pairs.pairs),
    )
    return Verdict(up.result, ["U1", "U2", "U3", "direct"], up.counterexample or direct.counterexample,
                   witness=uef, details=details)
