"""Text and JSON file formats: plans, delay scenarios, TPGs, groups and results."""
from __future__ import annotations

import hashlib
import json
import re

from .errors import GroupsFileError, MalformedPlan
from .graph import EdgeState, Stpg, Type2Pair
from .grouping import Grouping
from .plan import Delay, DelayScenario, MapfPlan

GROUPS_VERSION = 1
TIMING_KEYS = ("search_time_s", "phase_times")

_CELL = re.compile(r"^\((-?\d+),(-?\d+)\)$")


def parse_location(token: str):
    m = _CELL.match(token)
    return (int(m.group(1)), int(m.group(2))) if m else token


def format_location(loc) -> str:
    if isinstance(loc, tuple):
        return f"({loc[0]},{loc[1]})"
    text = str(loc)
    if not text or any(ch.isspace() for ch in text):
        raise ValueError(f"location {loc!r} cannot be written as a single token")
    return text


def parse_plan(text: str) -> MapfPlan:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MalformedPlan("empty plan file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "agents" or not head[1].isdigit():
        raise MalformedPlan(f"expected 'agents <n>', got {lines[0]!r}")
    n = int(head[1])
    if len(lines) - 1 != n:
        raise MalformedPlan(f"declared {n} agents but found {len(lines) - 1} agent lines")
    paths = []
    for i, line in enumerate(lines[1:]):
        label, sep, rest = line.partition(":")
        if not sep or label.split() != ["agent", str(i)]:
            raise MalformedPlan(f"expected 'agent {i}: ...', got {line!r}")
        tokens = rest.split()
        if not tokens:
            raise MalformedPlan(f"agent {i} has no locations")
        paths.append([parse_location(t) for t in tokens])
    return MapfPlan(paths)


def format_plan(plan: MapfPlan) -> str:
    out = [f"agents {plan.n_agents}"]
    for i, path in enumerate(plan.paths):
        out.append(f"agent {i}: " + " ".join(format_location(l) for l in path))
    return "\n".join(out) + "\n"


def plan_hash(plan: MapfPlan) -> str:
    return hashlib.sha256(format_plan(plan).encode()).hexdigest()


def _fields(line: str) -> dict:
    out = {}
    for tok in line.split()[1:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {tok!r}")
        out[key] = val
    return out


def parse_scenario(text: str) -> DelayScenario:
    scenario = DelayScenario()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        kind = line.split()[0]
        f = _fields(line)
        if kind == "scenario":
            scenario.p = float(f.get("p", 0.0))
            scenario.seed = int(f.get("seed", 0))
            if "range" in f:
                lo, hi = f["range"].split(":")
                scenario.delay_range = (int(lo), int(hi))
            scenario.mode = f.get("mode", scenario.mode)
            if "triggered" in f:
                scenario.triggered_at = int(f["triggered"])
        elif kind == "delay":
            scenario.delays.append(Delay(int(f["agent"]), int(f["step"]), int(f["duration"])))
        else:
            raise ValueError(f"unknown scenario line {line!r}")
    return scenario


def format_scenario(scenario: DelayScenario) -> str:
    lo, hi = scenario.delay_range
    head = f"scenario p={scenario.p!r} seed={scenario.seed} range={lo}:{hi} mode={scenario.mode}"
    if scenario.triggered_at is not None:
        head += f" triggered={scenario.triggered_at}"
    out = [head]
    out += [f"delay agent={d.agent} step={d.step} duration={d.duration}" for d in scenario.delays]
    return "\n".join(out) + "\n"


def tpg_to_json(tpg: Stpg, execution=None) -> dict:
    out = {
        "locations": [[format_location(l) for l in locs] for locs in tpg.locs],
        "costs": [list(c) for c in tpg.costs],
        "type2": [[*p.key, EdgeState(s).name.lower()] for p, s in zip(tpg.pairs, tpg.states)],
    }
    if execution is not None:
        out["arrivals"] = list(execution.arrivals)
        out["cost"] = execution.total
    return out


def tpg_from_json(data: dict) -> Stpg:
    locs = [[parse_location(t) for t in row] for row in data["locations"]]
    pairs = [Type2Pair(*row[:4]) for row in data["type2"]]
    states = bytes(EdgeState[row[4].upper()] for row in data["type2"])
    return Stpg(locs, data["costs"], pairs, states)


def groups_to_json(grouping: Grouping, stpg: Stpg, plan: MapfPlan) -> dict:
    by_pair: dict = {}
    for members in grouping.groups:
        pr = stpg.pairs[members[0]]
        steps = [[stpg.pairs[k].before_step, stpg.pairs[k].after_step] for k in members]
        by_pair.setdefault((pr.before_agent, pr.after_agent), []).append(steps)
    return {
        "version": GROUPS_VERSION,
        "method": grouping.method,
        "plan_sha256": plan_hash(plan),
        "pairs": [{"first": a, "second": b, "groups": gs} for (a, b), gs in sorted(by_pair.items())],
    }


def groups_from_json(data: dict, stpg: Stpg, plan: MapfPlan) -> Grouping:
    if data.get("version") != GROUPS_VERSION:
        raise GroupsFileError(f"groups file version {data.get('version')!r} is not {GROUPS_VERSION}")
    if data.get("plan_sha256") != plan_hash(plan):
        raise GroupsFileError("groups file was built from a different plan")
    index = stpg.layout.pair_index
    groups = []
    try:
        for entry in data["pairs"]:
            a, b = entry["first"], entry["second"]
            for g in entry["groups"]:
                groups.append([index[(a, bs, b, as_)] for bs, as_ in g])
    except (KeyError, TypeError, ValueError) as exc:
        raise GroupsFileError(f"groups file does not match the plan: {exc}") from exc
    seen = sorted(k for g in groups for k in g)
    if seen != list(range(len(stpg.pairs))):
        raise GroupsFileError("groups do not partition the plan's Type-2 pairs")
    group_of = [0] * len(stpg.pairs)
    for gi, g in enumerate(groups):
        for k in g:
            group_of[k] = gi
    return Grouping(groups, group_of, data.get("method", "full"))


def result_to_json(result, config) -> dict:
    return {
        "cost": result.cost,
        "outcome": result.outcome,
        "expanded_nodes": result.expanded_nodes,
        "generated_nodes": result.generated_nodes,
        "search_time_s": result.search_time,
        "phase_times": {k: result.phase_times.get(k, 0.0) for k in ("flpl", "blpl", "heuristic", "branch", "cycle", "other")},
        "settled_edges": result.settled_edges,
        "config_echo": config.echo(),
    }


def dump_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def determinism_digest(result_json: dict) -> str:
    """Hash of a result file with the timing fields dropped."""
    stable = {k: v for k, v in result_json.items() if k not in TIMING_KEYS}
    return hashlib.sha256(json.dumps(stable, sort_keys=True).encode()).hexdigest()
