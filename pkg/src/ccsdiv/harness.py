"""Random expressions, equivalence-preserving rewrites and test campaigns."""
from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .equivalence import check_dpbb, check_open_rooted, check_rooted, fresh_depth
from .syntax import (
    NIL,
    TAU,
    Choice,
    Expr,
    Nil,
    Prefix,
    Rec,
    Var,
    canonical,
    pretty,
    prefix_chain,
    size,
    unfold,
)

REWRITE_RULES = ("rec-unfold", "choice-comm", "choice-assoc", "choice-unit", "choice-idem", "tau-absorb")


@dataclass
class GenConfig:
    max_depth: int = 4
    actions: tuple = ("a", "b", TAU)
    var_pool: tuple = ("X",)
    binders: tuple = ("X", "Y")
    rec_probability: float = 0.2
    choice_probability: float = 0.3
    var_probability: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        for p in (self.rec_probability, self.choice_probability, self.var_probability):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability out of range: {p}")
        if not self.actions:
            raise ValueError("need at least one action")


def random_expr(c: GenConfig, rng: random.Random | None = None, closed: bool = False,
                depth: int | None = None) -> Expr:
    """Random expression of height at most ``depth`` (default ``c.max_depth``).

    With ``closed`` only rec-bound variables occur; otherwise free variables
    are drawn from ``c.var_pool``.
    """
    rng = random.Random(c.seed) if rng is None else rng

    def leaf(bound):
        avail = sorted(bound) if closed else sorted(set(c.var_pool) | set(bound))
        r = rng.random()
        if avail and r < c.var_probability:
            return Var(rng.choice(avail))
        if r < 0.5:
            return NIL
        return Prefix(rng.choice(c.actions), NIL)

    def gen(d, bound):
        if d <= 1:
            return leaf(bound)
        r = rng.random()
        if r < c.rec_probability:
            x = rng.choice(c.binders)
            return Rec(x, gen(d - 1, bound | {x}))
        r -= c.rec_probability
        if r < c.choice_probability:
            return Choice(gen(d - 1, bound), gen(d - 1, bound))
        r -= c.choice_probability
        if r < 0.1:
            return leaf(bound)
        return Prefix(rng.choice(c.actions), gen(d - 1, bound))

    return canonical(gen(c.max_depth if depth is None else depth, frozenset()))


# --------------------------------------------------------------------------
# rewriting


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    position: tuple


def _children(e: Expr) -> tuple:
    if isinstance(e, (Prefix, Rec)):
        return (e.body,)
    if isinstance(e, Choice):
        return (e.left, e.right)
    return ()


def _positions(e: Expr, here=()):
    yield here, e
    for i, ch in enumerate(_children(e)):
        yield from _positions(ch, here + (i,))


def _replace(e: Expr, pos: tuple, new: Expr) -> Expr:
    if not pos:
        return new
    i, rest = pos[0], pos[1:]
    if isinstance(e, Prefix):
        return Prefix(e.action, _replace(e.body, rest, new))
    if isinstance(e, Rec):
        return Rec(e.var, _replace(e.body, rest, new))
    if i == 0:
        return Choice(_replace(e.left, rest, new), e.right)
    return Choice(e.left, _replace(e.right, rest, new))


def _candidates(x: Expr, grow: bool):
    """``(rule, replacement)`` pairs applicable at subterm ``x``."""
    out = []
    if isinstance(x, Rec):
        out.append(("rec-unfold", unfold(x)))
    if isinstance(x, Choice):
        out.append(("choice-comm", Choice(x.right, x.left)))
        if isinstance(x.left, Choice):
            out.append(("choice-assoc", Choice(x.left.left, Choice(x.left.right, x.right))))
        if isinstance(x.right, Choice):
            out.append(("choice-assoc", Choice(Choice(x.left, x.right.left), x.right.right)))
        if isinstance(x.right, Nil):
            out.append(("choice-unit", x.left))
        if isinstance(x.left, Nil):
            out.append(("choice-unit", x.right))
        if x.left == x.right:
            out.append(("choice-idem", x.left))
    if isinstance(x, Prefix) and isinstance(x.body, Prefix) and x.body.action == TAU:
        out.append(("tau-absorb", Prefix(x.action, x.body.body)))
    if grow:
        out.append(("choice-unit", Choice(x, NIL)))
        out.append(("choice-idem", Choice(x, x)))
        if isinstance(x, Prefix):
            out.append(("tau-absorb", Prefix(x.action, Prefix(TAU, x.body))))
    return out


def rewrite_once(e: Expr, rng: random.Random, max_size: int = 40):
    """Apply one random rooted-equivalence-preserving rewrite somewhere in ``e``."""
    grow = size(e) < max_size
    options = []
    for pos, x in _positions(e):
        for rule, new in _candidates(x, grow):
            options.append((pos, rule, new))
    pos, rule, new = rng.choice(options)
    return canonical(_replace(e, pos, new)), RewriteStep(rule, pos)


def equivalent_variant(e: Expr, steps: int, seed, trace: list | None = None) -> Expr:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    for _ in range(steps):
        e, step = rewrite_once(e, rng)
        if trace is not None:
            trace.append(step)
    return e


# --------------------------------------------------------------------------
# campaigns


@dataclass
class Report:
    name: str
    seed: int
    n_cases: int
    cases: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self, timings: bool = False) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("timings")
        return d

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True)


def _case_rng(seed: int, i: int) -> random.Random:
    return random.Random(f"{seed}/{i}")


def congruence_case(c: GenConfig, i: int) -> dict:
    rng = _case_rng(c.seed, i)
    e = random_expr(c, rng)
    origin = "variant"
    f = None
    if rng.random() < 0.2:
        cand = random_expr(c, rng, depth=max(1, c.max_depth - 1))
        if check_open_rooted(e, cand):
            f, origin = cand, "random"
    if f is None:
        f = equivalent_variant(e, rng.randint(1, 4), rng)
    alpha = rng.choice(c.actions)
    h = random_expr(c, rng, depth=max(1, c.max_depth - 1))
    rec_e, rec_f = canonical(Rec("X", e)), canonical(Rec("X", f))
    checks = {
        "seed": bool(check_open_rooted(e, f)),
        "prefix": bool(check_open_rooted(Prefix(alpha, e), Prefix(alpha, f))),
        "choice_right": bool(check_open_rooted(Choice(e, h), Choice(f, h))),
        "choice_left": bool(check_open_rooted(Choice(h, e), Choice(h, f))),
        "rec": bool(check_rooted(rec_e, rec_f)),
    }
    return {
        "case": i, "E": pretty(e), "F": pretty(f), "origin": origin,
        "alpha": alpha, "H": pretty(h), "checks": checks,
    }


def coarsest_case(c: GenConfig, i: int, action: str = "a") -> dict:
    rng = _case_rng(c.seed, i)
    p = random_expr(c, rng, closed=True)
    kind = rng.choice(("variant", "tau", "tau-variant", "random"))
    if kind == "variant":
        q = equivalent_variant(p, rng.randint(1, 3), rng)
    elif kind == "tau":
        q = Prefix(TAU, p)
    elif kind == "tau-variant":
        q = equivalent_variant(Choice(Prefix(TAU, p), p) if rng.random() < 0.5 else Prefix(TAU, p),
                               rng.randint(0, 2), rng)
    else:
        q = random_expr(c, rng, closed=True)
    q = canonical(q)
    n = fresh_depth([p, q], action)
    probe = prefix_chain(action, n + 1)
    rooted = bool(check_rooted(p, q))
    lifted = bool(check_dpbb(Choice(p, probe), Choice(q, probe)))
    return {"case": i, "P": pretty(p), "Q": pretty(q), "kind": kind, "n": n,
            "rooted": rooted, "dpbb_with_probe": lifted}


def _run(name: str, fn, n_cases: int, c: GenConfig, workers: int) -> Report:
    t0 = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            cases = list(pool.map(fn, [c] * n_cases, range(n_cases)))
    else:
        cases = [fn(c, i) for i in range(n_cases)]
    cases.sort(key=lambda r: r["case"])
    return Report(name, c.seed, n_cases, cases, timings={"total_s": time.perf_counter() - t0})


def congruence_campaign(n_cases: int, c: GenConfig, workers: int = 1) -> Report:
    """Rooted-equivalent open pairs must stay rooted-equivalent under prefix,
    both choice contexts and rec-binding."""
    rep = _run("congruence", congruence_case, n_cases, c, workers)
    for case in rep.cases:
        failed = [k for k, v in case["checks"].items() if not v]
        if failed:
            rep.violations.append({"case": case["case"], "failed": failed,
                                   "E": case["E"], "F": case["F"], "H": case["H"],
                                   "alpha": case["alpha"]})
    rep.stats = {
        "origins": {o: sum(1 for k in rep.cases if k["origin"] == o) for o in ("variant", "random")},
        "distinct_pairs": sum(1 for k in rep.cases if k["E"] != k["F"]),
    }
    return rep


def coarsest_campaign(n_cases: int, c: GenConfig, workers: int = 1) -> Report:
    """``P ≃Δ Q`` iff ``P + a^(n+1) ≈Δ Q + a^(n+1)`` with ``n`` the fresh depth."""
    rep = _run("coarsest", coarsest_case, n_cases, c, workers)
    for case in rep.cases:
        if case["rooted"] != case["dpbb_with_probe"]:
            rep.violations.append({k: case[k] for k in ("case", "P", "Q", "n", "rooted", "dpbb_with_probe")})
    rep.stats = {
        "rooted_true": sum(1 for k in rep.cases if k["rooted"]),
        "rooted_false": sum(1 for k in rep.cases if not k["rooted"]),
    }
    return rep
