import random

from hypothesis import given, strategies as st

from stpg.graph import Direction, EdgeState, ReducedGraph, has_cycle, settle
from stpg.grouping import (OrderedPairSubgraph, edge_grouping, find_groupable_edges, group_stpg,
                           ordered_pair_subgraphs, presettle, reverse_edge, simple_grouping)
from stpg.oracle import forced_partner_edges, verify_groups
from stpg.plan import build_tpg, to_stpg, MapfPlan

from strategies import instance, seeds

PARALLEL = ((1, 0), (2, 1), (3, 2))
CROSSING = ((1, 2), (2, 1), (3, 0))
# a parallel run followed by a crossing run
MIXED = ((1, 0), (2, 1), (3, 3), (4, 2))


def sub(edges):
    return OrderedPairSubgraph(0, 1, tuple(edges))


def partition(groups):
    return sorted(tuple(sorted(g.members)) for g in groups)


def edge_sets(max_edges=12):
    pts = st.tuples(st.integers(1, 8), st.integers(0, 8))
    return st.sets(pts, min_size=1, max_size=max_edges).map(lambda s: tuple(sorted(s)))


def test_reverse_edge_is_involution():
    for e in [(1, 0), (3, 5), (2, 2)]:
        assert reverse_edge(reverse_edge(e)) == e
    assert reverse_edge((2, 3)) == (4, 1)


def test_named_patterns():
    for pattern in (PARALLEL, CROSSING):
        s = sub(pattern)
        assert len(edge_grouping(s)) == 1
        assert len(simple_grouping(s)) == 1
        assert verify_groups(s, edge_grouping(s)) is None
    s = sub(MIXED)
    assert len(edge_grouping(s)) == 1
    assert len(simple_grouping(s)) == 2
    assert verify_groups(s, edge_grouping(s)) is None
    assert verify_groups(s, simple_grouping(s)) is not None
    assert verify_groups(s, simple_grouping(s), maximal=False) is None


def test_mixed_pattern_from_a_plan():
    # agent 1 follows agent 0 through A, B and then visits D before C
    plan = MapfPlan([list("ABCDZ"), ["S", "T", "U", "A", "B", "D", "C"]])
    stpg = to_stpg(build_tpg(plan))
    subs = ordered_pair_subgraphs(stpg)
    assert sorted(subs[(0, 1)].edges) == [(1, 3), (2, 4), (3, 6), (4, 5)]
    assert len(group_stpg(stpg, "full")) == 1
    assert len(group_stpg(stpg, "simple")) == 2


def test_independent_edges_stay_apart():
    s = sub(((1, 0), (5, 7)))
    assert len(edge_grouping(s)) == 2
    assert verify_groups(s, edge_grouping(s)) is None


@given(edge_sets())
def test_full_grouping_sound_and_maximal(edges):
    s = sub(edges)
    groups = edge_grouping(s)
    assert verify_groups(s, groups) is None


@given(edge_sets())
def test_simple_grouping_sound_and_refines_full(edges):
    s = sub(edges)
    simple, full = simple_grouping(s), edge_grouping(s)
    assert verify_groups(s, simple, maximal=False) is None
    assert len(full) <= len(simple)
    owner = {e: i for i, g in enumerate(full) for e in g.members}
    for g in simple:
        assert len({owner[e] for e in g.members}) == 1


@given(edge_sets(8), st.randoms())
def test_grouping_ignores_input_order(edges, rnd):
    shuffled = list(edges)
    rnd.shuffle(shuffled)
    assert partition(edge_grouping(sub(edges))) == partition(edge_grouping(sub(shuffled)))


@given(edge_sets(8), st.data())
def test_groupable_edges_match_settlement_oracle(edges, data):
    e = data.draw(st.sampled_from(edges))
    assert find_groupable_edges(edges, e) == forced_partner_edges(sub(edges), e)


@given(seeds)
def test_grouping_on_plans(seed):
    _, _, stpg = instance(seed)
    full, simple = group_stpg(stpg, "full"), group_stpg(stpg, "simple")
    assert sorted(k for g in full.groups for k in g) == list(range(len(stpg.pairs)))
    assert len(full) <= len(simple)
    for s in ordered_pair_subgraphs(stpg).values():
        if len(s.edges) <= 12:
            assert verify_groups(s, edge_grouping(s)) is None


@given(seeds)
def test_presettle_follows_settled_members(seed):
    rng = random.Random(seed)
    _, _, stpg = instance(seed)
    grouping = group_stpg(stpg, "full")
    pre = presettle(stpg, grouping)
    for g in grouping.groups:
        states = {pre.states[k] for k in g}
        assert len(states) == 1 or states == {EdgeState.SWITCHABLE}
    # settling a whole group never needs to be undone by presettle
    open_ = [g for g in grouping.groups if all(pre.states[k] == EdgeState.SWITCHABLE for k in g)]
    if open_:
        g = rng.choice(open_)
        child = settle(pre, g, rng.choice((Direction.FIX, Direction.REVERSE)))
        assert presettle(child, grouping) == child
