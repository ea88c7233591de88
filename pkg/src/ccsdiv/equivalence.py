"""Divergence-preserving branching bisimilarity and its rooted variant.

Two backends compute the same partition:

* ``gfp_dpbb`` removes pairs from the full relation until every remaining
  pair satisfies the transfer condition (T) and the one-step divergence
  condition (D'') -- the reference implementation;
* ``refine_dpbb`` is signature refinement: blocks are split by internal
  divergence and by the set of (label, target block) moves reachable through
  inert tau-steps.
"""
from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .lts import (
    Lasso,
    Lts,
    divergent_path,
    divergent_states,
    mask_states,
    minimal_lasso_sets,
    tau_closure,
)
from .semantics import build_lts
from .syntax import TAU, Expr, canonical, is_closed, is_x_closed, prefix_chain

CONDITIONS = ("T", "D", "Dprime", "Dsecond", "R1R2")


class NotClosedError(ValueError):
    pass


class NotEquivalenceError(ValueError):
    pass


# --------------------------------------------------------------------------
# partitions and relations


@dataclass(frozen=True)
class Partition:
    """Blocks are sorted tuples, ordered by least member; ``divergent[b]``
    marks blocks in which some (hence every) state diverges internally."""

    blocks: tuple
    divergent: tuple

    @classmethod
    def from_ids(cls, l: Lts, ids: Sequence) -> "Partition":
        groups = defaultdict(list)
        for s, b in enumerate(ids):
            groups[b].append(s)
        blocks = tuple(sorted(tuple(g) for g in groups.values()))
        div = tuple(bool(divergent_states(l, b)) for b in blocks)
        return cls(blocks, div)

    def block_of(self, n: int | None = None) -> list:
        n = sum(map(len, self.blocks)) if n is None else n
        out = [0] * n
        for i, b in enumerate(self.blocks):
            for s in b:
                out[s] = i
        return out

    def same(self, s: int, t: int) -> bool:
        ids = self.block_of()
        return ids[s] == ids[t]

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class Relation:
    pairs: frozenset
    symmetric: bool = False

    @classmethod
    def of(cls, pairs: Iterable[tuple], symmetric: bool = True) -> "Relation":
        pairs = frozenset(pairs)
        if symmetric:
            pairs = pairs | {(q, p) for p, q in pairs}
        return cls(pairs, symmetric)

    @classmethod
    def from_partition(cls, p: Partition) -> "Relation":
        return cls(frozenset((s, t) for b in p.blocks for s in b for t in b), True)

    @classmethod
    def identity(cls, n: int) -> "Relation":
        return cls(frozenset((s, s) for s in range(n)), True)

    def image(self) -> dict:
        out = defaultdict(set)
        for p, q in self.pairs:
            out[p].add(q)
        return out

    def is_equivalence(self, n: int) -> bool:
        img = self.image()
        if any(s not in img.get(s, ()) for s in range(n)):
            return False
        return all(img[q] == img[p] for p in img for q in img[p])

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class Verdict:
    result: bool | None
    conditions: list
    counterexample: dict | None = None
    witness: object = field(default=None, repr=False)
    details: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return {True: "pass", False: "fail", None: "unknown"}[self.result]

    def __bool__(self) -> bool:
        return bool(self.result)

    def to_dict(self) -> dict:
        d = {"result": self.result, "conditions": list(self.conditions),
             "counterexample": self.counterexample}
        if self.details:
            d["details"] = self.details
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _cex(l: Lts, pair, condition: str, path=()) -> dict:
    return {"pair": [l.name(pair[0]), l.name(pair[1])], "condition": condition,
            "path": list(path)}


def _steps(l: Lts, seq) -> list:
    """Alternating state/label list rendered for evidence."""
    return [l.name(x) if i % 2 == 0 else x for i, x in enumerate(seq)]


def _lasso_steps(l: Lts, las: Lasso) -> list:
    out = []
    for i, s in enumerate(las.path()):
        if i:
            out.append(TAU)
        out.append(s)
    return _steps(l, out)


# --------------------------------------------------------------------------
# greatest fixpoint backend


def _by_label(l: Lts) -> list:
    out = []
    for succ in l.succ:
        d = defaultdict(list)
        for a, t in succ:
            d[a].append(t)
        out.append(d)
    return out


def gfp_relation(l: Lts, divergence: bool = True):
    """Greatest symmetric relation satisfying (T), and (D'') if ``divergence``.

    Returns ``(rel, reasons)``: ``rel[p]`` is the set of states related to
    ``p``; ``reasons[(p, q)]`` (p < q) records why a pair was removed.
    """
    n = l.n
    rel = [set(range(n)) for _ in range(n)]
    closure = [tau_closure(l, s) for s in range(n)]
    by_label = _by_label(l)
    reasons: dict = {}

    def transfer_fails(p: int, q: int):
        rp = rel[p]
        for a, p1 in l.succ[p]:
            r1 = rel[p1]
            ok = False
            for q2 in closure[q]:
                if q2 not in rp:
                    continue
                if a == TAU and q2 in r1:
                    ok = True
                    break
                if any(q1 in r1 for q1 in by_label[q2].get(a, ())):
                    ok = True
                    break
            if not ok:
                return (a, p1)
        return None

    changed = True
    while changed:
        changed = False
        bad_div = {}
        bad_sets = {}
        if divergence:
            for q in range(n):
                ts = l.tau_succ[q]
                bad = {s for s in range(n) if not any(t in rel[s] for t in ts)}
                bad_sets[q] = bad
                bad_div[q] = divergent_states(l, bad)
        for p in range(n):
            for q in sorted(rel[p]):
                if q <= p:
                    continue
                reason = None
                for x, y in ((p, q), (q, p)):
                    step = transfer_fails(x, y)
                    if step is not None:
                        reason = ("T", (x, y), [x, step[0], step[1]])
                        break
                    if divergence and x in bad_div[y]:
                        reason = ("Dsecond", (x, y), divergent_path(l, x, bad_sets[y]))
                        break
                if reason is not None:
                    rel[p].discard(q)
                    rel[q].discard(p)
                    reasons[(p, q)] = reason
                    changed = True
    return rel, reasons


def _partition_from_rel(l: Lts, rel) -> Partition:
    ids = [min(r) for r in rel]
    for p in range(l.n):
        for q in rel[p]:
            assert rel[q] == rel[p], "greatest fixpoint is not an equivalence"
    return Partition.from_ids(l, ids)


def gfp_dpbb(l: Lts) -> Partition:
    rel, _ = gfp_relation(l, divergence=True)
    return _partition_from_rel(l, rel)


def gfp_branching(l: Lts) -> Partition:
    rel, _ = gfp_relation(l, divergence=False)
    return _partition_from_rel(l, rel)


# --------------------------------------------------------------------------
# signature refinement backend


def _renumber(keys: Sequence) -> tuple[list, int]:
    ids: dict = {}
    out = [ids.setdefault(k, len(ids)) for k in keys]
    return out, len(ids)


def _refine(l: Lts, divergence: bool) -> Partition:
    n = l.n
    block = [0] * n
    count = 1 if n else 0
    while True:
        start = count
        if divergence:
            groups = defaultdict(list)
            for s in range(n):
                groups[block[s]].append(s)
            div = set()
            for members in groups.values():
                div |= divergent_states(l, members)
            block, count = _renumber([(block[s], s in div) for s in range(n)])
        sigs = []
        for s in range(n):
            b = block[s]
            inert = {s}
            stack = [s]
            while stack:
                x = stack.pop()
                for t in l.tau_succ[x]:
                    if block[t] == b and t not in inert:
                        inert.add(t)
                        stack.append(t)
            sig = frozenset(
                (a, block[t])
                for x in inert
                for a, t in l.succ[x]
                if not (a == TAU and block[t] == b)
            )
            sigs.append((b, sig))
        block, count = _renumber(sigs)
        if count == start:
            return Partition.from_ids(l, block)


def refine_dpbb(l: Lts) -> Partition:
    return _refine(l, divergence=True)


def branching_bisim(l: Lts) -> Partition:
    """Divergence-blind branching bisimilarity (greatest relation with (T))."""
    return _refine(l, divergence=False)


BACKENDS = {"gfp": gfp_dpbb, "refine": refine_dpbb}


def dpbb_partition(l: Lts, backend: str = "gfp") -> Partition:
    return BACKENDS[backend](l)


# --------------------------------------------------------------------------
# deciders on expressions


def _require(cond: bool, msg: str):
    if not cond:
        raise NotClosedError(msg)


def _root_mismatch(l: Lts, part: Partition, p: int, q: int):
    """First initial move of ``p`` not matched by an equally labelled initial
    move of ``q`` into the same block."""
    ids = part.block_of(l.n)
    for a, p1 in l.succ[p]:
        if not any(b == a and ids[q1] == ids[p1] for b, q1 in l.succ[q]):
            return [p, a, p1]
    return None


def _decide(p: Expr, q: Expr, *, extended: bool, rooted: bool, kind: str,
            backend: str = "gfp") -> Verdict:
    l = build_lts([p, q], extended=extended)
    sp, sq = l.roots
    if kind == "branching":
        part = branching_bisim(l)
        conditions = ["T"]
    else:
        part = dpbb_partition(l, backend)
        conditions = ["T", "Dsecond"]
    ids = part.block_of(l.n)
    if rooted:
        conditions = conditions + ["R1R2"]
        for x, y, name in ((sp, sq, "R1"), (sq, sp, "R2")):
            miss = _root_mismatch(l, part, x, y)
            if miss is not None:
                return Verdict(False, conditions, _cex(l, (x, y), name, _steps(l, miss)),
                               witness=part)
        return Verdict(True, conditions, witness=part)
    if ids[sp] == ids[sq]:
        return Verdict(True, conditions, witness=part)
    cex = None
    if kind != "branching":
        _, reasons = gfp_relation(l, divergence=True)
        cond, pair, path = reasons[(min(sp, sq), max(sp, sq))]
        if cond == "T":
            path = _steps(l, path)
        elif path is not None:
            path = _lasso_steps(l, path)
        cex = _cex(l, pair, cond, path or [])
    else:
        cex = _cex(l, (sp, sq), "T", [])
    return Verdict(False, conditions, cex, witness=part)


def check_dpbb(p: Expr, q: Expr, backend: str = "gfp") -> Verdict:
    _require(is_closed(p) and is_closed(q), "check_dpbb needs closed expressions")
    return _decide(p, q, extended=False, rooted=False, kind="dpbb", backend=backend)


def check_rooted(p: Expr, q: Expr, backend: str = "gfp") -> Verdict:
    _require(is_closed(p) and is_closed(q), "check_rooted needs closed expressions")
    return _decide(p, q, extended=False, rooted=True, kind="dpbb", backend=backend)


def check_branching(p: Expr, q: Expr, rooted: bool = False) -> Verdict:
    _require(is_closed(p) and is_closed(q), "check_branching needs closed expressions")
    return _decide(p, q, extended=False, rooted=rooted, kind="branching")


def check_open_dpbb(e: Expr, f: Expr, var: str = "X", backend: str = "gfp") -> Verdict:
    _require(is_x_closed(e, var) and is_x_closed(f, var),
             f"check_open_dpbb needs {var}-closed expressions")
    return _decide(e, f, extended=True, rooted=False, kind="dpbb", backend=backend)


def check_open_rooted(e: Expr, f: Expr, var: str = "X", backend: str = "gfp") -> Verdict:
    _require(is_x_closed(e, var) and is_x_closed(f, var),
             f"check_open_rooted needs {var}-closed expressions")
    return _decide(e, f, extended=True, rooted=True, kind="dpbb", backend=backend)


def _reach_from(l: Lts, roots: Iterable[int]) -> set:
    seen = set(roots)
    queue = deque(seen)
    while queue:
        s = queue.popleft()
        for _, t in l.succ[s]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def fresh_depth(roots: Sequence[Expr], action: str = "a", backend: str = "gfp") -> int:
    """Least ``n`` such that no state reachable from ``roots`` is equivalent
    to ``action^n``.  Open roots are compared in the extended system."""
    roots = [canonical(r) for r in roots]
    extended = not all(is_closed(r) for r in roots)
    probe = build_lts(roots, extended=extended)
    k = len(_reach_from(probe, probe.roots))
    chain = [prefix_chain(action, i) for i in range(k + 1)]
    l = build_lts(roots + chain[-1:], extended=extended)
    reach = _reach_from(l, l.roots[: len(roots)])
    ids = dpbb_partition(l, backend).block_of(l.n)
    taken = {ids[s] for s in reach}
    for i, c in enumerate(chain):
        if ids[l.index[c]] not in taken:
            return i
    raise AssertionError("a^i are pairwise inequivalent; unreachable")


# --------------------------------------------------------------------------
# condition verifier


def _first_transfer_failure(l: Lts, img, closure, by_label, p: int, q: int):
    rp = img.get(p, set())
    for a, p1 in l.succ[p]:
        r1 = img.get(p1, set())
        ok = False
        for q2 in closure[q]:
            if q2 not in rp:
                continue
            if (a == TAU and q2 in r1) or any(q1 in r1 for q1 in by_label[q2].get(a, ())):
                ok = True
                break
        if not ok:
            return [p, a, p1]
    return None


def verify_relation(r: Relation, l: Lts, conditions: Iterable[str],
                    partition: Partition | None = None, lasso_cap: int | None = None) -> Verdict:
    """Check the selected relational conditions for every pair of ``r``.

    ``D`` is the equivalence-relation restatement (block-local divergence
    agreement) and requires ``r`` to be an equivalence.
    """
    conditions = list(conditions)
    unknown = set(conditions) - set(CONDITIONS)
    if unknown:
        raise ValueError(f"unknown conditions: {sorted(unknown)}")
    img = r.image()
    pairs = sorted(r.pairs)
    closure = [tau_closure(l, s) for s in range(l.n)]
    by_label = _by_label(l)
    lassos: dict = {}

    def lasso_sets(p):
        if p not in lassos:
            lassos[p] = minimal_lasso_sets(l, p, lasso_cap)
        return lassos[p]

    def fail(pair, cond, path):
        return Verdict(False, conditions, _cex(l, pair, cond, path), witness=r)

    for cond in conditions:
        if cond == "T":
            for p, q in pairs:
                miss = _first_transfer_failure(l, img, closure, by_label, p, q)
                if miss is not None:
                    return fail((p, q), "T", _steps(l, miss))
        elif cond == "D":
            if not r.is_equivalence(l.n):
                raise NotEquivalenceError("condition D is only verified for equivalences")
            for cls in {frozenset(v) for v in img.values()}:
                div = divergent_states(l, cls)
                if div and div != cls:
                    p = min(div)
                    q = min(cls - div)
                    return fail((p, q), "D", _lasso_steps(l, divergent_path(l, p, cls)))
        elif cond == "Dsecond":
            for p, q in pairs:
                tq = l.tau_succ[q]
                for mask, las in lasso_sets(p):
                    if not any(t in img.get(s, ()) for s in mask_states(mask) for t in tq):
                        return fail((p, q), "Dsecond", _lasso_steps(l, las))
        elif cond == "Dprime":
            for p, q in pairs:
                for mask, las in lasso_sets(p):
                    allowed = set().union(*(img.get(s, set()) for s in mask_states(mask)))
                    if q not in allowed or not divergent_path(l, q, allowed):
                        return fail((p, q), "Dprime", _lasso_steps(l, las))
        elif cond == "R1R2":
            part = partition if partition is not None else gfp_dpbb(l)
            for p, q in pairs:
                for x, y, name in ((p, q, "R1"), (q, p, "R2")):
                    miss = _root_mismatch(l, part, x, y)
                    if miss is not None:
                        return fail((x, y), name, _steps(l, miss))
    return Verdict(True, conditions, witness=r)


def stuttering_check(l: Lts, p: Partition) -> Verdict:
    """Every tau-path that starts and ends in one block stays in it."""
    ids = p.block_of(l.n)
    preds = [[] for _ in range(l.n)]
    for s in range(l.n):
        for t in l.tau_succ[s]:
            preds[t].append(s)
    for b, blk in enumerate(p.blocks):
        fwd = _bfs_tree(blk, lambda x: l.tau_succ[x])
        bwd = _bfs_tree(blk, lambda x: preds[x])
        escaped = [t for t in fwd if ids[t] != b and t in bwd]
        if escaped:
            t = escaped[0]
            out = _unwind(fwd, t)
            back = _unwind(bwd, t)[::-1]
            path = out + back[1:]
            seq = []
            for i, s in enumerate(path):
                if i:
                    seq.append(TAU)
                seq.append(s)
            return Verdict(False, ["stuttering"],
                           _cex(l, (path[0], path[-1]), "stuttering", _steps(l, seq)), witness=p)
    return Verdict(True, ["stuttering"], witness=p)


def _bfs_tree(sources, nbrs) -> dict:
    parent = {s: None for s in sources}
    queue = deque(sources)
    while queue:
        x = queue.popleft()
        for y in nbrs(x):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return parent


def _unwind(parent: dict, t) -> list:
    path = [t]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]
