"""MAPF plans: validation, TPG construction, delay injection and STPG conversion."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Sequence

from .errors import DelayIndexOutOfRange, MalformedPlan, PlanConflict
from .graph import EdgeState, Stpg, Tpg, Type2Pair


@dataclass
class MapfPlan:
    """One location per timestep per agent; agents stay at their last location forever."""

    paths: list[list[Hashable]]

    @property
    def n_agents(self) -> int:
        return len(self.paths)

    @property
    def horizon(self) -> int:
        return max(len(p) for p in self.paths) - 1 if self.paths else 0

    def at(self, agent: int, t: int):
        path = self.paths[agent]
        return path[t] if t < len(path) else path[-1]

    def arrival_times(self) -> list[int]:
        """Timestep at which each agent reaches its goal for good."""
        out = []
        for path in self.paths:
            t = len(path) - 1
            while t > 0 and path[t - 1] == path[-1]:
                t -= 1
            out.append(t)
        return out


@dataclass(frozen=True)
class Conflict:
    kind: str
    timestep: int
    agents: tuple[int, int]
    location: Hashable


@dataclass
class ValidationReport:
    conflicts: list[Conflict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.conflicts


def validate_plan(plan: MapfPlan, grid=None) -> ValidationReport:
    """Report every vertex conflict and following conflict; with a grid, also check moves."""
    if not plan.paths:
        raise MalformedPlan("plan has no agents")
    for a, path in enumerate(plan.paths):
        if not path:
            raise MalformedPlan(f"agent {a} has an empty path")
        if grid is not None:
            for t, loc in enumerate(path):
                if not grid.passable(loc):
                    raise MalformedPlan(f"agent {a} at timestep {t} stands on blocked location {loc}")
                if t and not grid.adjacent(path[t - 1], loc):
                    raise MalformedPlan(f"agent {a} jumps from {path[t - 1]} to {loc} at timestep {t}")
    report = ValidationReport()
    n = plan.n_agents
    for t in range(plan.horizon + 1):
        here: dict = {}
        for a in range(n):
            here.setdefault(plan.at(a, t), []).append(a)
        for loc, agents in here.items():
            for a, b in combinations(agents, 2):
                report.conflicts.append(Conflict("vertex", t, (a, b), loc))
        if t == 0:
            continue
        before = {}
        for a in range(n):
            before.setdefault(plan.at(a, t - 1), []).append(a)
        for a in range(n):
            loc = plan.at(a, t)
            if loc == plan.at(a, t - 1):
                continue
            for b in before.get(loc, ()):
                if b != a:
                    report.conflicts.append(Conflict("following", t, (a, b), loc))
    return report


def merge_path(path: Sequence) -> tuple[list, list[int]]:
    """Collapse waits: merged locations and the first timestep of each merged vertex."""
    locs, first = [], []
    for t, loc in enumerate(path):
        if not locs or locs[-1] != loc:
            locs.append(loc)
            first.append(t)
    return locs, first


def build_tpg(plan: MapfPlan, validate: bool = True) -> Tpg:
    """TPG of the plan with unit Type-1 costs and one Type-2 pair per same-location vertex pair."""
    if validate:
        report = validate_plan(plan)
        if not report.ok:
            raise PlanConflict(report.conflicts)
    merged = [merge_path(p) for p in plan.paths]
    by_loc: dict = {}
    for a, (locs, first) in enumerate(merged):
        for s, (loc, t) in enumerate(zip(locs, first)):
            by_loc.setdefault(loc, []).append((t, a, s))
    pairs = []
    for visits in by_loc.values():
        for x, y in combinations(visits, 2):
            if x[1] == y[1]:
                continue
            (_, ba, bs), (_, aa, as_) = sorted((x, y))
            pairs.append(Type2Pair(ba, bs, aa, as_))
    pairs.sort(key=lambda p: p.key)
    locs = [m[0] for m in merged]
    costs = [[1] * (len(m[0]) - 1) for m in merged]
    try:
        return Tpg(locs, costs, pairs)
    except ValueError as exc:
        raise MalformedPlan(str(exc)) from exc


@dataclass(frozen=True)
class Delay:
    agent: int
    step: int
    duration: int


@dataclass
class DelayScenario:
    delays: list[Delay] = field(default_factory=list)
    p: float = 0.0
    seed: int = 0
    delay_range: tuple[int, int] = (10, 20)
    mode: str = "first"
    triggered_at: int | None = None

    @property
    def empty(self) -> bool:
        return not self.delays


def apply_delays(tpg: Stpg, scenario: DelayScenario) -> Stpg:
    """Add each delay to the outgoing Type-1 edge of the delayed vertex."""
    costs = [list(c) for c in tpg.costs]
    for d in scenario.delays:
        if not 0 <= d.agent < len(costs):
            raise DelayIndexOutOfRange(f"no agent {d.agent}")
        if not 0 <= d.step < len(costs[d.agent]):
            raise DelayIndexOutOfRange(f"agent {d.agent} has no outgoing edge at step {d.step}")
        if d.duration < 1:
            raise ValueError(f"delay duration must be >= 1, got {d.duration}")
        costs[d.agent][d.step] += d.duration
    return tpg.replace(costs=costs)


def switchable_candidate(stpg: Stpg, k: int) -> bool:
    """Pairs pointing at a goal, or whose reversal would point at a start, must keep their order."""
    pr = stpg.pairs[k]
    goal_step = stpg.layout.sizes[pr.after_agent] - 1
    return pr.after_step != goal_step and pr.before_step != 0


def to_stpg(tpg: Stpg) -> Stpg:
    states = bytes(EdgeState.SWITCHABLE if switchable_candidate(tpg, k) else EdgeState.FIXED
                   for k in range(len(tpg.pairs)))
    return Stpg(tpg.locs, tpg.costs, states=states, layout=tpg.layout)


def generate_scenario(plan: MapfPlan, p: float, seed: int, delay_range: tuple[int, int] = (10, 20),
                      mode: str = "first", retries: int = 0) -> DelayScenario:
    """Walk the plan timestep by timestep, delaying each still-moving agent with probability ``p``.

    ``mode="first"`` stops after the first timestep at which any delay fires;
    ``mode="full"`` keeps going to the end of the plan.  With ``retries``, an
    empty draw is repeated with seeds ``seed + 1``, ``seed + 2``, ...
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if mode not in ("first", "full"):
        raise ValueError(f"unknown scenario mode {mode!r}")
    lo, hi = delay_range
    if not 1 <= lo <= hi:
        raise ValueError(f"bad delay range {delay_range}")
    step_at = []
    for path in plan.paths:
        _, first = merge_path(path)
        steps, s = [], 0
        for t in range(plan.horizon + 1):
            while s + 1 < len(first) and first[s + 1] <= t:
                s += 1
            steps.append(s)
        step_at.append((steps, len(first) - 1))
    scenario = DelayScenario([], p, seed, (lo, hi), mode)
    for attempt in range(retries + 1):
        rng = random.Random(seed + attempt)
        delays = []
        for t in range(plan.horizon):
            for a, (steps, last) in enumerate(step_at):
                if steps[t] < last and rng.random() < p:
                    delays.append(Delay(a, steps[t], rng.randint(lo, hi)))
            if delays and mode == "first":
                scenario.triggered_at = t
                break
        if delays:
            scenario.delays = delays
            scenario.seed = seed + attempt
            break
    return scenario
