"""Finite labelled transition systems and the graph queries used by the
equivalence checkers."""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .syntax import TAU, Expr, is_var_label, pretty

DEFAULT_LASSO_CAP = 10_000


class LassoCapExceeded(RuntimeError):
    pass


def lasso_cap() -> int:
    return int(os.environ.get("CCSDIV_LASSO_CAP", DEFAULT_LASSO_CAP))


class Lts:
    """States are indices ``0..n-1``; ``states[i]`` is the expression (or any
    printable name) of state ``i``.  Adjacency lists are deduplicated and
    sorted."""

    def __init__(self, states: Sequence, succ: Sequence[Iterable], roots: Sequence[int] = (0,)):
        self.states = list(states)
        self.succ = [tuple(sorted(set(out))) for out in succ]
        self.roots = tuple(roots)
        n = len(self.states)
        assert len(self.succ) == n
        for out in self.succ:
            for _, t in out:
                if not 0 <= t < n:
                    raise ValueError(f"edge target {t} out of range")
        self.tau_succ = [tuple(t for a, t in out if a == TAU) for out in self.succ]
        self.index = {s: i for i, s in enumerate(self.states)}

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple], roots: Sequence[int] = (0,)) -> "Lts":
        succ = [[] for _ in range(n)]
        for s, a, t in edges:
            succ[s].append((a, t))
        return cls(list(range(n)), succ, roots)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def n(self) -> int:
        return len(self.states)

    def edges(self) -> Iterator[tuple]:
        for s, out in enumerate(self.succ):
            for a, t in out:
                yield s, a, t

    @property
    def labels(self) -> set:
        return {a for _, a, _ in self.edges()}

    def name(self, s: int) -> str:
        x = self.states[s]
        return pretty(x) if isinstance(x, Expr) else str(x)

    def state_of(self, e) -> int:
        return self.index[e]

    def __repr__(self) -> str:
        return f"Lts({self.n} states, {sum(map(len, self.succ))} edges, roots={self.roots})"


# --------------------------------------------------------------------------
# tau-reachability and divergence


def tau_closure(l: Lts, s: int, allowed: set | None = None) -> set:
    """States reachable from ``s`` by zero or more tau-steps (inside ``allowed``)."""
    seen = {s}
    stack = [s]
    while stack:
        x = stack.pop()
        for t in l.tau_succ[x]:
            if t not in seen and (allowed is None or t in allowed):
                seen.add(t)
                stack.append(t)
    return seen


def divergent_states(l: Lts, allowed: Iterable[int]) -> set:
    """States of ``allowed`` with an infinite tau-path staying in ``allowed``."""
    allowed = set(allowed)
    # peel off states all of whose in-allowed tau-successors are peeled;
    # what survives lies on or leads into a tau-cycle inside allowed
    outdeg = {s: 0 for s in allowed}
    preds: dict[int, list] = {s: [] for s in allowed}
    for s in allowed:
        for t in l.tau_succ[s]:
            if t in allowed:
                outdeg[s] += 1
                preds[t].append(s)
    work = [s for s, d in outdeg.items() if d == 0]
    dead = set(work)
    while work:
        t = work.pop()
        for s in preds[t]:
            outdeg[s] -= 1
            if outdeg[s] == 0 and s not in dead:
                dead.add(s)
                work.append(s)
    return allowed - dead


def diverges_within(l: Lts, s: int, allowed: Iterable[int] | None = None) -> bool:
    allowed = set(range(l.n)) if allowed is None else set(allowed)
    if s not in allowed:
        return False
    reach = tau_closure(l, s, allowed)
    return bool(divergent_states(l, reach))


def divergent_path(l: Lts, s: int, allowed: Iterable[int] | None = None):
    """A lasso ``(stem, cycle)`` of tau-steps from ``s`` inside ``allowed``, or None."""
    allowed = set(range(l.n)) if allowed is None else set(allowed)
    if s not in allowed:
        return None
    div = divergent_states(l, tau_closure(l, s, allowed))
    if s not in div:
        return None
    # every divergent state has a divergent tau-successor: walk until a repeat
    path = [s]
    pos = {s: 0}
    while True:
        nxt = next(t for t in l.tau_succ[path[-1]] if t in div)
        if nxt in pos:
            i = pos[nxt]
            return Lasso(tuple(path[: i + 1]), tuple(path[i:]))
        pos[nxt] = len(path)
        path.append(nxt)


@dataclass(frozen=True)
class Lasso:
    stem: tuple
    cycle: tuple

    @property
    def states(self) -> frozenset:
        return frozenset(self.stem) | frozenset(self.cycle)

    def path(self) -> list:
        """stem followed by one trip around the cycle back to the junction."""
        return list(self.stem) + list(self.cycle[1:]) + [self.cycle[0]]


def simple_lassos(l: Lts, s: int, cap: int | None = None) -> Iterator[Lasso]:
    """Every tau-lasso from ``s`` whose stem and cycle are simple."""
    cap = lasso_cap() if cap is None else cap
    count = 0
    path = [s]
    pos = {s: 0}
    # explicit DFS stack of successor iterators
    iters = [iter(l.tau_succ[s])]
    while iters:
        t = next(iters[-1], None)
        if t is None:
            iters.pop()
            v = path.pop()
            del pos[v]
            continue
        if t in pos:
            count += 1
            if count > cap:
                raise LassoCapExceeded(f"more than {cap} lassos from state {s}")
            i = pos[t]
            yield Lasso(tuple(path[: i + 1]), tuple(path[i:]))
        else:
            pos[t] = len(path)
            path.append(t)
            iters.append(iter(l.tau_succ[t]))


def minimal_lasso_sets(l: Lts, s: int, cap: int | None = None) -> list:
    """State sets (as bitmasks) of the inclusion-minimal simple lassos from ``s``."""
    masks = set()
    witness = {}
    for las in simple_lassos(l, s, cap):
        m = 0
        for x in las.states:
            m |= 1 << x
        if m not in masks:
            masks.add(m)
            witness[m] = las
    ordered = sorted(masks, key=lambda m: (bin(m).count("1"), m))
    minimal = []
    for m in ordered:
        if not any(k & m == k for k in minimal):
            minimal.append(m)
    return [(m, witness[m]) for m in minimal]


def mask_states(m: int) -> list:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


# --------------------------------------------------------------------------
# quotient


def quotient(l: Lts, p) -> Lts:
    """Block-level LTS.  Inert tau-steps vanish; a divergent block keeps one
    tau self-loop.  State ``b`` is named by its block's least member."""
    block = p.block_of(l.n)
    succ = [set() for _ in p.blocks]
    for s, a, t in l.edges():
        b, c = block[s], block[t]
        if a == TAU and b == c:
            continue
        succ[b].add((a, c))
    for b, div in enumerate(p.divergent):
        if div:
            succ[b].add((TAU, b))
    names = [l.states[min(blk)] for blk in p.blocks]
    return Lts(names, succ, [block[r] for r in l.roots])


# --------------------------------------------------------------------------
# Aldebaran format

_AUT_HEADER = re.compile(r"\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*")
_AUT_EDGE = re.compile(r'\s*\(\s*(\d+)\s*,\s*"((?:[^"\\]|\\.)*)"\s*,\s*(\d+)\s*\)\s*')


def _label_out(a: str) -> str:
    return f"var:{a}" if is_var_label(a) else a


def _label_in(a: str) -> str:
    return a[4:] if a.startswith("var:") else a


def to_aut(l: Lts) -> str:
    root = l.roots[0] if l.roots else 0
    edges = list(l.edges())
    lines = [f"des ({root}, {len(edges)}, {l.n})"]
    lines += [f'({s}, "{_label_out(a)}", {t})' for s, a, t in edges]
    return "\n".join(lines) + "\n"


def from_aut(text: str) -> Lts:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty .aut input")
    m = _AUT_HEADER.fullmatch(lines[0])
    if not m:
        raise ValueError(f"bad .aut header: {lines[0]!r}")
    root, n_edges, n_states = map(int, m.groups())
    edges = []
    for ln in lines[1:]:
        e = _AUT_EDGE.fullmatch(ln)
        if not e:
            raise ValueError(f"bad .aut edge: {ln!r}")
        edges.append((int(e.group(1)), _label_in(e.group(2)), int(e.group(3))))
    if len(edges) != n_edges:
        raise ValueError(f".aut header announces {n_edges} edges, found {len(edges)}")
    return Lts.from_edges(n_states, edges, [root])


def partition_to_json(l: Lts, p) -> str:
    blocks = [
        {"states": [l.name(s) for s in blk], "divergent": bool(div)}
        for blk, div in zip(p.blocks, p.divergent)
    ]
    return json.dumps({"blocks": blocks}, indent=2)
