"""Deliberately naive reference implementations used as test oracles.

Nothing here shares code with the library beyond the data types.
"""
from functools import lru_cache
from itertools import permutations

from ccsdiv.syntax import NIL, TAU, Choice, Nil, Prefix, Rec, Var, canonical, substitute


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def tau_star(l, s):
    reach = {s}
    changed = True
    while changed:
        changed = False
        for x, a, y in l.edges():
            if a == TAU and x in reach and y not in reach:
                reach.add(y)
                changed = True
    return reach


def tau_path_of_length(l, s, k, allowed):
    """Is there a tau-path with ``k`` steps from ``s`` staying in ``allowed``?"""
    if s not in allowed:
        return False
    frontier = {s}
    for _ in range(k):
        frontier = {y for x, a, y in l.edges() if a == TAU and x in frontier and y in allowed}
        if not frontier:
            return False
    return True


def brute_diverges(l, s, allowed=None):
    allowed = set(range(l.n)) if allowed is None else set(allowed)
    return tau_path_of_length(l, s, len(allowed) + 1, allowed)


def satisfies_T(l, block, stars=None, out=None):
    stars = stars or [tau_star(l, s) for s in range(l.n)]
    out = out or [[(a, y) for x, a, y in l.edges() if x == s] for s in range(l.n)]
    for p in range(l.n):
        for q in range(l.n):
            if block[p] != block[q]:
                continue
            for a, p1 in out[p]:
                if a == TAU and block[p1] == block[q]:
                    continue
                ok = any(
                    block[q2] == block[p] and block[q1] == block[p1]
                    for q2 in stars[q]
                    for c, q1 in out[q2]
                    if c == a
                )
                if not ok:
                    return False
    return True


def block_divergence_agrees(l, block):
    for b in set(block):
        members = {s for s in range(l.n) if block[s] == b}
        flags = {brute_diverges(l, s, members) for s in members}
        if len(flags) > 1:
            return False
    return True


def brute_partition(l, divergence=True):
    """Coarsest equivalence satisfying (T) (and block-local divergence
    agreement), found by enumerating every partition.  Also asserts that
    every valid partition refines it, i.e. that it is the union of all."""
    stars = [tau_star(l, s) for s in range(l.n)]
    out = [[(a, y) for x, a, y in l.edges() if x == s] for s in range(l.n)]
    valid = []
    for part in set_partitions(range(l.n)):
        block = [0] * l.n
        for i, blk in enumerate(part):
            for s in blk:
                block[s] = i
        if satisfies_T(l, block, stars, out) and (not divergence or block_divergence_agrees(l, block)):
            valid.append(block)
    best = min(valid, key=lambda b: len(set(b)))
    for b in valid:
        for s in range(l.n):
            for t in range(l.n):
                if b[s] == b[t]:
                    assert best[s] == best[t], "valid partitions have no greatest element"
    groups = {}
    for s, b in enumerate(best):
        groups.setdefault(b, []).append(s)
    return sorted(tuple(g) for g in groups.values())


def brute_lassos(l, s):
    """All (stem, cycle) pairs from ``s`` via permutations of the other states."""
    tau = {(x, y) for x, a, y in l.edges() if a == TAU}
    others = [x for x in range(l.n) if x != s]
    out = set()
    for k in range(len(others) + 1):
        for rest in permutations(others, k):
            path = (s,) + rest
            if not all((path[i], path[i + 1]) in tau for i in range(len(path) - 1)):
                continue
            for i, x in enumerate(path):
                if (path[-1], x) in tau:
                    out.add((path[: i + 1], path[i:]))
    return out


def naive_transitions(e, extended=False, height=40):
    """Transitions with a derivation of height at most ``height``."""

    @lru_cache(maxsize=None)
    def go(e, h):
        if h == 0:
            return frozenset()
        if isinstance(e, Prefix):
            return frozenset({(e.action, canonical(e.body))})
        if isinstance(e, Var):
            return frozenset({(e.name, NIL)}) if extended else frozenset()
        if isinstance(e, Nil):
            return frozenset()
        if isinstance(e, Choice):
            return go(e.left, h - 1) | go(e.right, h - 1)
        if isinstance(e, Rec):
            return go(canonical(substitute(e.body, {e.var: e})), h - 1)
        raise TypeError(e)

    return go(canonical(e), height)
