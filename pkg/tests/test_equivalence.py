import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccsdiv.equivalence import (
    NotClosedError,
    NotEquivalenceError,
    Partition,
    Relation,
    branching_bisim,
    check_branching,
    check_dpbb,
    check_open_dpbb,
    check_open_rooted,
    check_rooted,
    fresh_depth,
    gfp_dpbb,
    refine_dpbb,
    stuttering_check,
    verify_relation,
)
from ccsdiv.harness import GenConfig, random_expr
from ccsdiv.lts import Lts, tau_closure
from ccsdiv.semantics import build_lts
from ccsdiv.syntax import TAU, Choice, Prefix, parse, prefix_chain, substitute
from conftest import closed_exprs, random_lts, small_lts, x_closed_exprs
from oracles import brute_partition

P = parse


def joint(*texts, extended=False):
    return build_lts([P(t) for t in texts], extended=extended)


# --------------------------------------------------------------------------
# backends


def test_gfp_examples():
    l = joint("0", "tau.0")
    assert len(gfp_dpbb(l)) == 1
    l = joint("rec X.X", "rec X. tau.X")
    assert len(gfp_dpbb(l)) == 2
    l = build_lts([prefix_chain("a", i) for i in range(6)])
    assert len(gfp_dpbb(l)) == 6


def test_refine_examples():
    assert len(refine_dpbb(Lts.from_edges(1, []))) == 1
    l = Lts.from_edges(2, [(0, TAU, 0)])
    assert refine_dpbb(l).blocks == ((0,), (1,))


def test_branching_examples():
    assert len(branching_bisim(joint("rec X.X", "rec X. tau.X"))) == 1
    assert len(branching_bisim(joint("0", "tau.0"))) == 1
    assert len(branching_bisim(joint("0", "a.0"))) == 2


@settings(max_examples=150)
@given(small_lts(max_states=7))
def test_backends_match_partition_enumeration(l):
    want = brute_partition(l)
    assert list(gfp_dpbb(l).blocks) == want
    assert list(refine_dpbb(l).blocks) == want
    assert list(branching_bisim(l).blocks) == brute_partition(l, divergence=False)


def test_backends_agree_on_larger_lts():
    rng = random.Random(7)
    for _ in range(60):
        l = random_lts(rng, 30)
        assert gfp_dpbb(l) == refine_dpbb(l)


@settings(max_examples=150)
@given(small_lts(max_states=12))
def test_partition_is_divergence_faithful(l):
    p = gfp_dpbb(l)
    assert verify_relation(Relation.from_partition(p), l, ["D"]).result
    assert Relation.from_partition(p).is_equivalence(l.n)


# --------------------------------------------------------------------------
# deciders


def test_check_examples():
    assert check_dpbb(P("0"), P("tau.0")).result is True
    assert check_rooted(P("0"), P("tau.0")).result is False
    assert check_rooted(P("0 + a.0"), P("tau.0 + a.0")).result is False
    assert check_dpbb(P("0 + a.0"), P("tau.0 + a.0")).result is False
    assert check_rooted(P("a.0 + a.0"), P("a.0")).result is True
    v = check_dpbb(P("rec X.X"), P("rec X. tau.X"))
    assert v.result is False and v.counterexample["condition"] in ("Dsecond", "T")


def test_branching_ignores_divergence():
    assert check_branching(P("rec X.X"), P("rec X. tau.X")).result is True
    assert check_branching(P("0"), P("tau.0"), rooted=True).result is False


def test_open_examples():
    assert check_open_dpbb(P("X"), P("tau.X")).result is True
    assert check_open_rooted(P("X"), P("tau.X")).result is False
    assert check_open_rooted(P("a.X"), P("a.X + a.X")).result is True


def test_closedness_errors():
    with pytest.raises(NotClosedError):
        check_dpbb(P("X"), P("0"))
    with pytest.raises(NotClosedError):
        check_open_dpbb(P("X"), P("Y"))


@pytest.mark.parametrize("i", range(7))
@pytest.mark.parametrize("j", range(7))
def test_chains_distinct(i, j):
    assert check_dpbb(prefix_chain("a", i), prefix_chain("a", j)).result == (i == j)


def test_verdict_json_schema():
    v = check_rooted(P("0 + a.0"), P("tau.0 + a.0"))
    d = json.loads(v.to_json())
    assert set(d) >= {"result", "conditions", "counterexample"}
    cx = d["counterexample"]
    assert set(cx) == {"pair", "condition", "path"}
    assert all(isinstance(s, str) for s in cx["pair"])


def test_fresh_depth_examples():
    assert fresh_depth([P("0")]) == 1
    assert fresh_depth([P("a.0")]) == 2
    assert fresh_depth([P("rec X. tau.X")]) == 0


@settings(max_examples=100)
@given(closed_exprs(5), closed_exprs(5))
def test_fresh_depth_is_least(p, q):
    n = fresh_depth([p, q])
    chain = [prefix_chain("a", i) for i in range(n + 1)]
    l = build_lts([p, q] + chain)
    ids = gfp_dpbb(l).block_of(l.n)
    reach = set()
    for r in l.roots[:2]:
        stack = [r]
        while stack:
            x = stack.pop()
            if x not in reach:
                reach.add(x)
                stack.extend(t for _, t in l.succ[x])
    taken = {ids[s] for s in reach}
    assert ids[l.index[chain[n]]] not in taken
    assert all(ids[l.index[c]] in taken for c in chain[:n])


@settings(max_examples=200)
@given(closed_exprs(5), closed_exprs(5))
def test_rooted_implies_unrooted(p, q):
    if check_rooted(p, q).result:
        assert check_dpbb(p, q).result


@settings(max_examples=200)
@given(closed_exprs(5))
def test_tau_prefix_is_unrooted_equivalent(p):
    assert check_dpbb(p, Prefix(TAU, p)).result


@settings(max_examples=200)
@given(closed_exprs(5), closed_exprs(5))
def test_backend_choice_does_not_change_verdict(p, q):
    assert check_dpbb(p, q).result == check_dpbb(p, q, backend="refine").result
    assert check_rooted(p, q).result == check_rooted(p, q, backend="refine").result


# --------------------------------------------------------------------------
# condition verifier


def test_verify_partition_passes():
    l = joint("0", "tau.0", "rec X. tau.X", "a.tau.0 + a.0")
    r = Relation.from_partition(gfp_dpbb(l))
    assert verify_relation(r, l, ["T", "Dprime", "Dsecond", "D"]).result


def test_verify_branching_partition_fails_divergence():
    l = joint("rec X.X", "rec X. tau.X")
    r = Relation.from_partition(branching_bisim(l))
    v = verify_relation(r, l, ["Dsecond"])
    assert v.result is False
    assert v.counterexample["condition"] == "Dsecond"
    assert v.counterexample["pair"][0] == "rec X. tau.X"


@settings(max_examples=100)
@given(small_lts(max_states=10))
def test_identity_passes_everything(l):
    r = Relation.identity(l.n)
    assert verify_relation(r, l, ["T", "D", "Dprime", "Dsecond", "R1R2"]).result


def test_D_needs_equivalence():
    l = joint("0", "tau.0")
    with pytest.raises(NotEquivalenceError):
        verify_relation(Relation.of([(0, 1)]), l, ["D"])


def test_unknown_condition():
    with pytest.raises(ValueError):
        verify_relation(Relation.identity(1), Lts.from_edges(1, []), ["X"])


def test_transfer_failure_reported():
    l = joint("a.0", "b.0")
    v = verify_relation(Relation.of([(0, 1)]), l, ["T"])
    assert v.result is False and v.counterexample["condition"] == "T"


def test_root_condition_reported():
    l = joint("0 + a.0", "tau.0 + a.0")
    r = Relation.of([(l.roots[0], l.roots[1])])
    v = verify_relation(r, l, ["R1R2"])
    assert v.result is False and v.counterexample["condition"] in ("R1", "R2")


@settings(max_examples=150)
@given(small_lts(max_states=10))
def test_primed_conditions_hold_for_the_partition(l):
    r = Relation.from_partition(gfp_dpbb(l))
    assert verify_relation(r, l, ["T", "Dprime", "Dsecond"]).result


@settings(max_examples=150)
@given(small_lts(max_states=8))
def test_branching_partition_divergence_verdicts_agree(l):
    """On a branching bisimulation equivalence, D, D' and D'' agree."""
    r = Relation.from_partition(branching_bisim(l))
    verdicts = {verify_relation(r, l, [c]).result for c in ("D", "Dprime", "Dsecond")}
    assert len(verdicts) == 1


# --------------------------------------------------------------------------
# stuttering and long steps


def test_stuttering_examples():
    l = joint("0", "tau.0")
    assert stuttering_check(l, gfp_dpbb(l)).result
    l = Lts.from_edges(3, [(0, TAU, 1), (1, TAU, 2), (1, "a", 1)])
    bad = Partition.from_ids(l, [0, 1, 0])
    v = stuttering_check(l, bad)
    assert v.result is False
    assert v.counterexample["path"] == ["0", TAU, "1", TAU, "2"]


@settings(max_examples=200)
@given(small_lts(max_states=12))
def test_stuttering_on_computed_partitions(l):
    assert stuttering_check(l, gfp_dpbb(l)).result


@settings(max_examples=150)
@given(small_lts(max_states=8))
def test_long_step_simulation(l):
    ids = gfp_dpbb(l).block_of(l.n)
    star = [tau_closure(l, s) for s in range(l.n)]
    for p in range(l.n):
        for q in range(l.n):
            if ids[p] != ids[q]:
                continue
            for p2 in star[p]:
                for a, p1 in l.succ[p2]:
                    assert any(
                        ids[q2] == ids[p2]
                        and ((a == TAU and ids[q2] == ids[p1])
                             or any(c == a and ids[q1] == ids[p1] for c, q1 in l.succ[q2]))
                        for q2 in star[q]
                    )


# --------------------------------------------------------------------------
# open terms


def _closed_samples(rng, k):
    return [random_expr(GenConfig(max_depth=3), rng, closed=True) for _ in range(k)]


@settings(max_examples=150)
@given(x_closed_exprs(4), x_closed_exprs(4), st.integers(0, 10 ** 6))
def test_open_verdict_matches_probe_substitution(e, f, seed):
    n = fresh_depth([e, f])
    probe = prefix_chain("a", n + 1)
    open_v = check_open_dpbb(e, f).result
    assert open_v == check_dpbb(substitute(e, {"X": probe}), substitute(f, {"X": probe})).result
    assert check_open_rooted(e, f).result == check_rooted(
        substitute(e, {"X": probe}), substitute(f, {"X": probe})).result
    if open_v:
        for p in _closed_samples(random.Random(seed), 5):
            assert check_dpbb(substitute(e, {"X": p}), substitute(f, {"X": p})).result


def test_choice_context_breaks_unrooted():
    assert check_dpbb(P("0"), P("tau.0")).result
    assert not check_dpbb(Choice(P("0"), P("a.0")), Choice(P("tau.0"), P("a.0"))).result
