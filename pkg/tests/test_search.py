import random

import pytest
from hypothesis import given, settings

from stpg.errors import InfeasibleInput
from stpg.graph import Direction, EdgeState, ReducedGraph, Stpg, Type2Pair, has_cycle, simulate_execution
from stpg.grouping import group_stpg
from stpg.longest_paths import longest_paths
from stpg.oracle import enumerate_optimal
from stpg.plan import DelayScenario, apply_delays, to_stpg
from stpg.search import (SearchConfig, SearchNode, all_configs, branch, optimize, select_conflicting_edge)
from stpg.heuristics import edge_slack, h_value

from strategies import instance, seeds


def root_node(stpg):
    lp = longest_paths(ReducedGraph(stpg))
    return SearchNode(stpg, h_value(stpg, lp), lp, n_switchable=len(stpg.switchable()))


def test_demo_children(demo_stpg):
    kids = branch(root_node(demo_stpg), [0], SearchConfig())
    assert [(c.settled[1], c.h_value) for c in kids] == [(Direction.FIX, 11), (Direction.REVERSE, 9)]


@pytest.mark.parametrize("config", [SearchConfig.gses(), SearchConfig.igses()], ids=["gses", "igses"])
def test_demo_optimum(demo_stpg, config):
    res = optimize(demo_stpg, None, config)
    assert res.outcome == "optimal" and res.cost == 9
    assert res.tpg.states[0] == EdgeState.REVERSED
    assert res.expanded_nodes == 2
    assert res.settled_edges == [[0, 1, 1, 2, "reversed"]]
    assert simulate_execution(res.tpg).total == 9


def test_no_switchable_pairs_expands_once():
    stpg = Stpg([list("AB"), list("CDE")], [[1], [1, 1]])
    res = optimize(stpg)
    assert res.cost == 3 and res.expanded_nodes == 1 and res.generated_nodes == 1


def test_empty_scenario_gives_undelayed_cost(demo_tpg):
    res = optimize(to_stpg(apply_delays(demo_tpg, DelayScenario())))
    assert res.cost == simulate_execution(demo_tpg).total


def test_timeout(demo_stpg):
    res = optimize(demo_stpg, None, SearchConfig(time_limit=0.0))
    assert res.outcome == "timeout" and res.tpg is None and res.cost is None


def test_cyclic_root_is_rejected():
    pairs = [Type2Pair(0, 1, 1, 2), Type2Pair(1, 1, 0, 2)]
    stpg = Stpg([list("AXYB"), list("CYXD")], [[1] * 3, [1] * 3], pairs, bytes([EdgeState.FIXED] * 2))
    with pytest.raises(InfeasibleInput):
        optimize(stpg)


def test_both_children_cyclic_is_a_dead_end():
    # the fixed pairs already pin the order both ways around the open pair
    stpg = Stpg([list("AXYB"), list("CYXD")], [[1] * 3, [1] * 3],
                [Type2Pair(0, 1, 1, 2), Type2Pair(1, 1, 0, 2)], bytes([EdgeState.FIXED, EdgeState.SWITCHABLE]))
    node = root_node(stpg)
    kids = branch(node, [1], SearchConfig())
    assert all(not has_cycle(ReducedGraph(k.stpg)) for k in kids)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(grouping="clever")
    with pytest.raises(ValueError):
        SearchConfig.preset("astar")
    assert len(all_configs()) == 96


def test_branching_strategies(demo_stpg):
    fwd = longest_paths(ReducedGraph(demo_stpg)).forward
    for strategy in ("random", "earliest", "agent", "slack"):
        assert select_conflicting_edge(demo_stpg, fwd, strategy, random.Random(0)) == 0
    with pytest.raises(ValueError):
        select_conflicting_edge(demo_stpg, fwd, "widest")


@settings(max_examples=40)
@given(seeds)
def test_every_config_reaches_the_oracle_minimum(seed):
    _, _, stpg = instance(seed, max_switchable=8)
    best, _ = enumerate_optimal(stpg)
    groups = {m: group_stpg(stpg, m) for m in ("full", "simple")}
    for config in all_configs():
        res = optimize(stpg, groups.get(config.grouping), config)
        assert res.cost == best, config


@given(seeds)
def test_admissible_at_every_expanded_node(seed):
    _, _, stpg = instance(seed, max_switchable=8)
    best, _ = enumerate_optimal(stpg)
    seen = []
    res = optimize(stpg, None, SearchConfig(), observer=lambda ev, n: ev == "expand" and seen.append(n))
    assert res.cost == best
    assert res.root_h >= res.root_goal_sum
    for node in seen:
        assert node.h_value <= best
        node_best, _ = enumerate_optimal(node.stpg)
        assert node.h_value <= node_best


@given(seeds)
def test_termination_rule(seed):
    _, _, stpg = instance(seed)
    seen = []
    res = optimize(stpg, None, SearchConfig(), observer=lambda ev, n: ev == "expand" and seen.append(n))
    assert not has_cycle(ReducedGraph(res.tpg))
    terminal = seen[-1]
    assert res.cost == terminal.lp.goal_sum(stpg.layout.goals) == simulate_execution(res.tpg).total


@given(seeds)
def test_phase_timers_bounded_by_total(seed):
    _, _, stpg = instance(seed)
    res = optimize(stpg, None, SearchConfig.gses())
    assert sum(res.phase_times.values()) <= res.search_time + 1e-9


@given(seeds)
def test_incremental_nodes_match_scratch(seed):
    _, _, stpg = instance(seed)
    seen = []
    optimize(stpg, None, SearchConfig(), observer=lambda ev, n: seen.append(n))
    for node in seen:
        fresh = longest_paths(ReducedGraph(node.stpg))
        assert node.lp.forward == fresh.forward
        assert (node.lp.backward == fresh.backward).all()


@given(seeds)
def test_branching_keys(seed):
    _, _, stpg = instance(seed)
    fwd = longest_paths(ReducedGraph(stpg)).forward
    lay = stpg.layout
    conflicts = [k for k in stpg.switchable() if edge_slack(stpg, fwd, k) < 0]
    if not conflicts:
        assert select_conflicting_edge(stpg, fwd, "slack") is None
        return
    pick = {s: select_conflicting_edge(stpg, fwd, s, random.Random(1)) for s in ("random", "earliest", "agent", "slack")}
    assert pick["random"] in conflicts
    assert pick["slack"] == min(conflicts, key=lambda k: edge_slack(stpg, fwd, k))
    assert pick["earliest"] == min(conflicts, key=lambda k: (fwd[lay.fix_dst[k]], fwd[lay.fix_src[k]]))
    agent = lambda k: min(lay.pairs[k].before_agent, lay.pairs[k].after_agent)
    assert pick["agent"] == min(conflicts, key=agent)
