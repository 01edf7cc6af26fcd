import pytest
from hypothesis import given, strategies as st

from stpg.errors import DelayIndexOutOfRange, MalformedPlan, PlanConflict
from stpg.graph import EdgeState, simulate_execution
from stpg.gridmap import GridMap
from stpg.plan import (Delay, DelayScenario, MapfPlan, apply_delays, build_tpg, generate_scenario, merge_path,
                       to_stpg, validate_plan)

from strategies import instance, seeds


def test_vertex_conflict():
    report = validate_plan(MapfPlan([list("AB"), list("CB")]))
    assert [(c.kind, c.timestep, c.location) for c in report.conflicts] == [("vertex", 1, "B")]


def test_following_conflict():
    report = validate_plan(MapfPlan([list("AB"), list("BC")]))
    assert [(c.kind, c.timestep, c.agents) for c in report.conflicts] == [("following", 1, (0, 1))]
    with pytest.raises(PlanConflict):
        build_tpg(MapfPlan([list("AB"), list("BC")]))


def test_parked_agent_blocks_later_visitors():
    report = validate_plan(MapfPlan([list("AB"), list("CDEB")]))
    assert report.conflicts and report.conflicts[0].location == "B"


def test_grid_checks():
    grid = GridMap(2, 2, frozenset({(1, 1)}))
    assert validate_plan(MapfPlan([[(0, 0), (0, 1)]]), grid).ok
    with pytest.raises(MalformedPlan):
        validate_plan(MapfPlan([[(0, 1), (1, 1)]]), grid)
    with pytest.raises(MalformedPlan):
        validate_plan(MapfPlan([[(0, 0), (1, 1)]]), grid)
    with pytest.raises(MalformedPlan):
        validate_plan(MapfPlan([]))


def test_merge_path():
    assert merge_path(list("AABBBC")) == (list("ABC"), [0, 2, 5])


def test_fixture_tpg(demo_tpg):
    assert demo_tpg.locs == (tuple("AGH"), tuple("EFGCD"))
    assert demo_tpg.costs == ((1, 1), (1, 1, 1, 1))
    assert len(demo_tpg.pairs) == 1


def test_switchable_rules():
    # G is visited by agent 0 at step 0 (its start), so the pair stays fixed;
    # H is agent 1's goal, so that pair stays fixed as well
    # and A is an ordinary switchable pair
    plan = MapfPlan([list("GAHK"), list("XYGAH")])
    stpg = to_stpg(build_tpg(plan))
    assert [p.key for p in stpg.pairs] == [(0, 0, 1, 2), (0, 1, 1, 3), (0, 2, 1, 4)]
    assert list(stpg.states) == [EdgeState.FIXED, EdgeState.SWITCHABLE, EdgeState.FIXED]


def test_apply_delays(demo_tpg):
    delayed = apply_delays(demo_tpg, DelayScenario([Delay(0, 0, 2)]))
    assert delayed.costs[0] == (3, 1)
    assert simulate_execution(delayed).total == 11
    assert apply_delays(demo_tpg, DelayScenario()) == demo_tpg
    with pytest.raises(DelayIndexOutOfRange):
        apply_delays(demo_tpg, DelayScenario([Delay(0, 2, 1)]))
    with pytest.raises(DelayIndexOutOfRange):
        apply_delays(demo_tpg, DelayScenario([Delay(5, 0, 1)]))
    with pytest.raises(ValueError):
        apply_delays(demo_tpg, DelayScenario([Delay(0, 0, 0)]))


def test_scenario_extremes(demo_plan):
    assert generate_scenario(demo_plan, 0.0, 1).empty
    first = generate_scenario(demo_plan, 1.0, 1)
    # both agents are still moving at timestep 0
    assert [(d.agent, d.step) for d in first.delays] == [(0, 0), (1, 0)]
    assert first.triggered_at == 0
    full = generate_scenario(demo_plan, 1.0, 1, mode="full")
    assert [(d.agent, d.step) for d in full.delays] == [(0, 0), (1, 0), (0, 1), (1, 1), (1, 1), (1, 2), (1, 3)]
    assert all(10 <= d.duration <= 20 for d in full.delays)
    with pytest.raises(ValueError):
        generate_scenario(demo_plan, 1.5, 1)
    with pytest.raises(ValueError):
        generate_scenario(demo_plan, 0.5, 1, (5, 2))


def test_scenario_retries(demo_plan):
    s = generate_scenario(demo_plan, 0.05, 0, retries=1000)
    assert not s.empty and s.seed >= 0


@given(seeds, st.floats(0, 1), st.sampled_from(["first", "full"]))
def test_scenario_determinism(seed, p, mode):
    plan, _, _ = instance(seed)
    a = generate_scenario(plan, p, seed, (1, 9), mode)
    b = generate_scenario(plan, p, seed, (1, 9), mode)
    assert a == b
    tpg = build_tpg(plan)
    apply_delays(tpg, a)  # every drawn delay addresses a real Type-1 edge
    if mode == "first" and not a.empty:
        assert len({d.agent for d in a.delays}) == len(a.delays)


@given(seeds)
def test_delays_keep_acyclicity_and_raise_cost(seed):
    plan, scenario, _ = instance(seed)
    tpg = build_tpg(plan)
    base = simulate_execution(tpg).total
    delayed = apply_delays(tpg, scenario)
    assert simulate_execution(delayed).total >= base
