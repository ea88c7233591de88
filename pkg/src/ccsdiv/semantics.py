"""Structural operational semantics and state-space construction.

The transition relation is the least one closed under the prefix, rec and
two choice rules; the extended relation adds ``X --X--> 0`` for every
variable.  Derivations are searched goal-by-goal: a goal is an expression
whose outgoing transitions are wanted, and it depends on the goals its
last rule consults (both summands of a choice, the unfolding of a rec).
The least relation gives a goal exactly the direct contributions
(prefix and variable axioms) of all goals it can reach, so dependency
cycles such as ``rec X.X`` add nothing.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .lts import Lts
from .syntax import NIL, Choice, Expr, Prefix, Rec, Var, canonical, pretty, unfold

DEFAULT_STATE_CAP = 100_000


class ResourceLimitError(RuntimeError):
    pass


def state_cap() -> int:
    return int(os.environ.get("CCSDIV_STATE_CAP", DEFAULT_STATE_CAP))


class Semantics:
    """A derivation session owning its memo table."""

    def __init__(self, extended: bool = False):
        self.extended = extended
        self._done: dict[Expr, frozenset] = {}

    @staticmethod
    def _deps(e: Expr) -> tuple:
        if isinstance(e, Choice):
            return (e.left, e.right)
        if isinstance(e, Rec):
            return (unfold(e),)
        return ()

    def _direct(self, e: Expr) -> set:
        if isinstance(e, Prefix):
            return {(e.action, canonical(e.body))}
        if isinstance(e, Var) and self.extended:
            return {(e.name, NIL)}
        return set()

    def transitions(self, e: Expr) -> frozenset:
        """All ``(label, target)`` pairs with ``e --label--> target``."""
        done = self._done
        if e in done:
            return done[e]
        # Tarjan over the goal dependency graph: every goal in a strongly
        # connected component gets the same (least) result
        index: dict[Expr, int] = {}
        low: dict[Expr, int] = {}
        stack: list[Expr] = []
        on_stack: set = set()
        partial: dict[Expr, set] = {}

        def visit(g: Expr):
            index[g] = low[g] = len(index)
            stack.append(g)
            on_stack.add(g)
            acc = self._direct(g)
            for d in self._deps(g):
                if d not in done and d not in index:
                    visit(d)
                if d in done:
                    acc |= done[d]
                elif d in on_stack:
                    low[g] = min(low[g], low[d])
            partial[g] = acc
            if low[g] == index[g]:
                members = []
                while True:
                    h = stack.pop()
                    on_stack.discard(h)
                    members.append(h)
                    if h == g:
                        break
                result = frozenset().union(*(partial.pop(h) for h in members))
                for h in members:
                    done[h] = result

        visit(e)
        return done[e]


def transitions(e: Expr, extended: bool = False) -> frozenset:
    return Semantics(extended).transitions(e)


def _sorted_steps(steps) -> list:
    return sorted(steps, key=lambda st: (st[0], pretty(st[1])))


@dataclass
class ReachSet:
    seed: Expr
    members: list = field(default_factory=list)
    edges: set = field(default_factory=set)


def _explore(roots: Sequence[Expr], sem: Semantics, cap: int):
    order: list[Expr] = []
    seen: dict[Expr, int] = {}
    succ: list[list] = []
    queue = deque()
    for r in roots:
        r = canonical(r)
        if r not in seen:
            seen[r] = len(order)
            order.append(r)
            queue.append(r)
    while queue:
        s = queue.popleft()
        out = []
        for label, t in _sorted_steps(sem.transitions(s)):
            if t not in seen:
                if len(order) >= cap:
                    raise ResourceLimitError(f"state space exceeds {cap} states")
                seen[t] = len(order)
                order.append(t)
                queue.append(t)
            out.append((label, seen[t]))
        succ.append(out)
    return order, seen, succ


def reachable(e: Expr, extended: bool = False, cap: int | None = None) -> ReachSet:
    """Every expression reachable from ``e``, with all their outgoing edges."""
    cap = state_cap() if cap is None else cap
    order, _, succ = _explore([e], Semantics(extended), cap)
    edges = {(order[i], label, order[j]) for i, out in enumerate(succ) for label, j in out}
    return ReachSet(seed=order[0], members=order, edges=edges)


def build_lts(roots: Sequence[Expr], extended: bool = False, cap: int | None = None,
              session: Semantics | None = None) -> Lts:
    """Joint LTS of the roots, states interned up to alpha-equivalence."""
    cap = state_cap() if cap is None else cap
    sem = session if session is not None else Semantics(extended)
    order, seen, succ = _explore(roots, sem, cap)
    return Lts(order, succ, [seen[canonical(r)] for r in roots])
