import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ccsdiv.harness import GenConfig, random_expr
from ccsdiv.lts import Lts
from ccsdiv.syntax import NIL, TAU, Choice, Prefix, Rec, Var, canonical

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACTIONS = ("a", "b", TAU)


def exprs(max_depth=4, free=("X",), binders=("X", "Y"), actions=ACTIONS):
    """Hypothesis strategy for expressions; ``free`` lists allowed free variables."""

    def build(depth, bound):
        names = sorted(set(free) | bound)
        leaves = [st.just(NIL)]
        if names:
            leaves.append(st.sampled_from(names).map(Var))
        leaf = st.one_of(*leaves)
        if depth <= 1:
            return leaf
        sub = st.deferred(lambda: build(depth - 1, bound))
        rec = st.sampled_from(binders).flatmap(
            lambda x: build(depth - 1, bound | {x}).map(lambda b: Rec(x, b)))
        return st.one_of(
            leaf,
            st.tuples(st.sampled_from(actions), sub).map(lambda t: Prefix(*t)),
            st.tuples(sub, sub).map(lambda t: Choice(*t)),
            rec,
        )

    return build(max_depth, frozenset()).map(canonical)


def closed_exprs(max_depth=4):
    return exprs(max_depth, free=())


def x_closed_exprs(max_depth=4):
    return exprs(max_depth, free=("X",))


@st.composite
def small_lts(draw, max_states=7, labels=("a", "b", TAU), tau_weight=2):
    n = draw(st.integers(1, max_states))
    pool = list(labels) + [TAU] * (tau_weight - 1)
    edges = draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.sampled_from(pool), st.integers(0, n - 1)),
        max_size=3 * n))
    return Lts.from_edges(n, edges)


def random_lts(rng: random.Random, n_max=30, labels=("a", "b", TAU)) -> Lts:
    n = rng.randint(1, n_max)
    density = rng.uniform(0.5, 2.5)
    edges = []
    for _ in range(int(density * n)):
        a = TAU if rng.random() < 0.45 else rng.choice(labels)
        edges.append((rng.randrange(n), a, rng.randrange(n)))
    return Lts.from_edges(n, edges)


def seeded_exprs(n, seed, closed=True, max_depth=6):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        c = GenConfig(max_depth=rng.randint(2, max_depth), seed=i)
        out.append(random_expr(c, rng, closed=closed))
    return out
