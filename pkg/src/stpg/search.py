"""Best-first search over STPG settlements.

The open list is ordered by h-value alone (the g-value is always zero).  A
node whose switchable pairs all have non-negative slack is terminal: fixing
them keeps every earliest arrival time, so its reduced cost is optimal.
"""
from __future__ import annotations

import heapq
import itertools
import random
import time
from dataclasses import dataclass, field, replace
from typing import Callable

from .errors import CycleEncountered, InfeasibleInput
from .graph import Direction, EdgeState, ReducedGraph, Stpg, Tpg, fix_all, settle, settled_edges, topological_order
from .grouping import Grouping, count_switchable_groups, group_stpg, presettle
from .heuristics import edge_slack, h_value
from .longest_paths import LongestPathState, blpl, blpl_incremental, flpl_incremental, forward_from_order

GROUPINGS = ("none", "simple", "full")
BRANCHINGS = ("random", "earliest", "agent", "slack")
HEURISTICS = ("plain", "strong")
LONGEST_PATHS = ("scratch", "incremental")
PHASES = ("flpl", "blpl", "heuristic", "branch", "cycle", "other")


@dataclass(frozen=True)
class SearchConfig:
    algorithm: str = "igses"
    grouping: str = "full"
    branching: str = "slack"
    heuristic: str = "strong"
    longest_path: str = "incremental"
    time_limit: float = 16.0
    seed: int = 0

    def __post_init__(self):
        for name, allowed in (("grouping", GROUPINGS), ("branching", BRANCHINGS),
                              ("heuristic", HEURISTICS), ("longest_path", LONGEST_PATHS)):
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")

    @classmethod
    def gses(cls, **overrides) -> "SearchConfig":
        base = cls("gses", "none", "agent", "plain", "scratch")
        return replace(base, **overrides)

    @classmethod
    def igses(cls, **overrides) -> "SearchConfig":
        return replace(cls(), **overrides)

    @classmethod
    def preset(cls, name: str, **overrides) -> "SearchConfig":
        if name == "gses":
            return cls.gses(**overrides)
        if name == "igses":
            return cls.igses(**overrides)
        raise ValueError(f"unknown algorithm {name!r}")

    def echo(self) -> dict:
        return {"algorithm": self.algorithm, "grouping": self.grouping, "branching": self.branching,
                "heuristic": self.heuristic, "longest_path": self.longest_path,
                "time_limit": self.time_limit, "seed": self.seed}


ALGORITHMS = ("gses", "igses")


def all_configs(time_limit: float = 16.0, seed: int = 0) -> list[SearchConfig]:
    """Every combination of the config fields.  ``algorithm`` is only a label, so each toggle set appears twice."""
    return [SearchConfig(a, g, b, h, lp, time_limit, seed)
            for a, g, b, h, lp in itertools.product(ALGORITHMS, GROUPINGS, BRANCHINGS, HEURISTICS, LONGEST_PATHS)]


@dataclass
class SearchNode:
    stpg: Stpg
    h_value: int
    lp: LongestPathState
    parent: "SearchNode | None" = None
    settled: tuple[tuple[int, ...], Direction] | None = None
    n_switchable: int = 0
    depth: int = 0


@dataclass
class SearchResult:
    outcome: str
    tpg: Tpg | None = None
    cost: int | None = None
    expanded_nodes: int = 0
    generated_nodes: int = 0
    search_time: float = 0.0
    phase_times: dict = field(default_factory=lambda: dict.fromkeys(PHASES, 0.0))
    root_h: int | None = None
    root_goal_sum: int | None = None
    terminal_cost: int | None = None
    n_groups: int = 0
    settled_edges: list = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.outcome == "optimal"


def conflicting_edges(stpg: Stpg, forward) -> list[tuple[int, int]]:
    return [(k, s) for k in stpg.switchable() if (s := edge_slack(stpg, forward, k)) < 0]


def select_conflicting_edge(stpg: Stpg, forward, strategy: str, rng: random.Random | None = None) -> int | None:
    """Pick one switchable pair with negative slack, or ``None`` when there is none."""
    conflicts = conflicting_edges(stpg, forward)
    if not conflicts:
        return None
    lay = stpg.layout
    if strategy == "random":
        return (rng or random.Random(0)).choice(conflicts)[0]
    if strategy == "earliest":
        key = lambda ks: (forward[lay.fix_dst[ks[0]]], forward[lay.fix_src[ks[0]]], ks[0])
    elif strategy == "agent":
        def key(ks):
            pr = lay.pairs[ks[0]]
            return (min(pr.before_agent, pr.after_agent), ks[0])
    elif strategy == "slack":
        key = lambda ks: (ks[1], ks[0])
    else:
        raise ValueError(f"unknown branching strategy {strategy!r}")
    return min(conflicts, key=key)[0]


class _Timers:
    def __init__(self):
        self.t = dict.fromkeys(PHASES, 0.0)

    def add(self, phase, start):
        now = time.perf_counter()
        self.t[phase] += now - start
        return now


def _scratch_child(stpg, strong, timers):
    graph = ReducedGraph(stpg)
    t = time.perf_counter()
    order = topological_order(graph)
    t = timers.add("cycle", t)
    if order is None:
        return None
    lp = forward_from_order(graph, order)
    t = timers.add("flpl", t)
    if strong:
        lp.backward = blpl(graph, order)
        timers.add("blpl", t)
    return lp


def _incremental_child(stpg, parent_lp, new_edges, strong, timers):
    graph = ReducedGraph(stpg)
    t = time.perf_counter()
    try:
        forward = flpl_incremental(parent_lp.forward, graph, new_edges)
    except CycleEncountered:
        timers.add("cycle", t)
        return None
    t = timers.add("flpl", t)
    lp = LongestPathState(forward)
    if strong:
        lp.backward = blpl_incremental(parent_lp.backward, forward, graph, new_edges)
        timers.add("blpl", t)
    return lp


def branch(node: SearchNode, members, config: SearchConfig, timers: _Timers | None = None) -> list[SearchNode]:
    """Fix and Reverse children of ``node`` for the pair group ``members``; cyclic children are dropped."""
    timers = timers or _Timers()
    strong = config.heuristic == "strong"
    children = []
    for direction in (Direction.FIX, Direction.REVERSE):
        t = time.perf_counter()
        child = settle(node.stpg, members, direction)
        new_edges = settled_edges(node.stpg, members, direction)
        timers.add("other", t)
        if config.longest_path == "incremental":
            lp = _incremental_child(child, node.lp, new_edges, strong, timers)
        else:
            lp = _scratch_child(child, strong, timers)
        if lp is None:
            continue
        t = time.perf_counter()
        h = h_value(child, lp, strong)
        timers.add("heuristic", t)
        children.append(SearchNode(child, h, lp, node, (tuple(members), direction),
                                   node.n_switchable - len(members), node.depth + 1))
    return children


def optimize(stpg_init: Stpg, groups: Grouping | None = None, config: SearchConfig | None = None,
             observer: Callable[[str, SearchNode], None] | None = None) -> SearchResult:
    config = config or SearchConfig()
    start = time.perf_counter()
    timers = _Timers()
    rng = random.Random(config.seed)
    strong = config.heuristic == "strong"

    stpg = stpg_init
    if config.grouping != "none":
        if groups is None or groups.method != config.grouping:
            groups = group_stpg(stpg_init, config.grouping)
        stpg = presettle(stpg_init, groups)
    else:
        groups = None

    t = time.perf_counter()
    graph = ReducedGraph(stpg)
    order = topological_order(graph)
    t = timers.add("cycle", t)
    if order is None:
        raise InfeasibleInput("the reduced view of the initial STPG is cyclic")
    lp = forward_from_order(graph, order)
    t = timers.add("flpl", t)
    if strong:
        lp.backward = blpl(graph, order)
        t = timers.add("blpl", t)
    root = SearchNode(stpg, h_value(stpg, lp, strong), lp, n_switchable=stpg.count(EdgeState.SWITCHABLE))
    timers.add("heuristic", t)

    result = SearchResult("timeout", root_h=root.h_value, root_goal_sum=lp.goal_sum(stpg.layout.goals))
    result.n_groups = count_switchable_groups(stpg, groups) if groups else stpg.count(EdgeState.SWITCHABLE)
    counter = itertools.count()
    open_list = [(root.h_value, root.n_switchable, -next(counter), root)]
    result.generated_nodes = 1

    while open_list:
        if time.perf_counter() - start > config.time_limit:
            break
        _, _, _, node = heapq.heappop(open_list)
        result.expanded_nodes += 1
        if observer:
            observer("expand", node)
        t = time.perf_counter()
        k = select_conflicting_edge(node.stpg, node.lp.forward, config.branching, rng)
        t = timers.add("branch", t)
        if k is None:
            tpg = fix_all(node.stpg)
            timers.add("other", t)
            result.outcome = "optimal"
            result.tpg = tpg
            result.cost = result.terminal_cost = node.lp.goal_sum(tpg.layout.goals)
            result.settled_edges = _orientation_record(stpg_init, tpg)
            break
        members = [m for m in (groups.members(k) if groups else [k])
                   if node.stpg.states[m] == EdgeState.SWITCHABLE]
        for child in branch(node, members, config, timers):
            heapq.heappush(open_list, (child.h_value, child.n_switchable, -next(counter), child))
            result.generated_nodes += 1
            if observer:
                observer("child", child)
    else:
        result.outcome = "infeasible"

    result.search_time = time.perf_counter() - start
    result.phase_times = timers.t
    return result


def _orientation_record(stpg_init: Stpg, tpg: Tpg) -> list:
    out = []
    for k, st in enumerate(stpg_init.states):
        if st == EdgeState.SWITCHABLE:
            out.append([*stpg_init.pairs[k].key, "fixed" if tpg.states[k] == EdgeState.FIXED else "reversed"])
    return out
