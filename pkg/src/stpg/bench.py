"""Benchmark harness: generate grid instances, run search configurations, aggregate."""
from __future__ import annotations

import csv
import random
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .graph import EdgeState, ReducedGraph, topological_order
from .gridmap import plan_agents, random_grid
from .grouping import group_stpg
from .plan import apply_delays, build_tpg, generate_scenario, to_stpg
from .longest_paths import forward_from_order
from .search import PHASES, SearchConfig, optimize

ROW_FIELDS = [
    "instance_id", "map", "agents", "p", "seed", "scenario_seed", "n_delays", "n_switchable",
    "config", "algorithm", "grouping", "branching", "heuristic", "longest_path",
    "outcome", "success", "cost", "expanded_nodes", "generated_nodes", "search_time_s",
    "n_groups", "root_h", "root_goal_sum", "termination_ok", *[f"time_{p}" for p in PHASES],
]
AGG_FIELDS = ["map", "agents", "config", "runs", "solved", "success_rate",
              "mean_search_time_s", "mean_expanded_nodes"]


@dataclass
class BenchConfig:
    maps: list = field(default_factory=lambda: [{"label": "random-32-32-10", "height": 32, "width": 32,
                                                "obstacles": 0.1}])
    agents: list = field(default_factory=lambda: [20, 30, 40])
    instances: int = 5
    scenarios: int = 1
    p: float = 0.01
    delay_range: tuple = (10, 20)
    configs: list = field(default_factory=lambda: ["gses", "igses"])
    time_limit: float = 16.0
    seed: int = 0
    workers: int = 1

    @classmethod
    def from_json(cls, data: dict) -> "BenchConfig":
        known = cls.__dataclass_fields__
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown bench config keys {sorted(unknown)}")
        cfg = cls(**data)
        cfg.delay_range = tuple(cfg.delay_range)
        return cfg


def make_config(spec, time_limit: float, seed: int) -> tuple[str, SearchConfig]:
    if isinstance(spec, str):
        return spec, SearchConfig.preset(spec, time_limit=time_limit, seed=seed)
    spec = dict(spec)
    name = spec.pop("name")
    base = spec.pop("algorithm", "igses")
    return name, SearchConfig.preset(base, time_limit=time_limit, seed=seed, **spec)


def make_plan(map_spec: dict, n_agents: int, seed: int):
    rng = random.Random(f"{map_spec['label']}/{n_agents}/{seed}")
    grid = random_grid(map_spec["height"], map_spec["width"], map_spec.get("obstacles", 0.1), rng)
    for _ in range(20):
        plan = plan_agents(grid, n_agents, rng)
        if plan is not None:
            return grid, plan
    raise RuntimeError(f"could not plan {n_agents} agents on {map_spec['label']}")


def run_instance(task) -> list[dict]:
    """One plan, its scenarios, every configuration.  Runs inside a worker process."""
    map_spec, n_agents, idx, cfg = task
    seed = cfg.seed * 100003 + idx
    _, plan = make_plan(map_spec, n_agents, seed)
    tpg = build_tpg(plan)
    configs = [make_config(c, cfg.time_limit, cfg.seed) for c in cfg.configs]
    base_groups = {}
    rows = []
    for s in range(cfg.scenarios):
        scenario = generate_scenario(plan, cfg.p, seed * 1000 + s, cfg.delay_range, retries=10_000)
        stpg = to_stpg(apply_delays(tpg, scenario))
        for name, conf in configs:
            groups = None
            if conf.grouping != "none":
                if conf.grouping not in base_groups:
                    base_groups[conf.grouping] = group_stpg(stpg, conf.grouping)
                groups = base_groups[conf.grouping]
            res = optimize(stpg, groups, conf)
            row = {
                "instance_id": f"{map_spec['label']}/{n_agents}/{idx}/{s}", "map": map_spec["label"],
                "agents": n_agents, "p": cfg.p, "seed": seed, "scenario_seed": scenario.seed,
                "n_delays": len(scenario.delays), "n_switchable": stpg.count(EdgeState.SWITCHABLE),
                "config": name, **{k: v for k, v in conf.echo().items() if k not in ("time_limit", "seed")},
                "outcome": res.outcome, "success": int(res.optimal), "cost": res.cost,
                "expanded_nodes": res.expanded_nodes, "generated_nodes": res.generated_nodes,
                "search_time_s": round(res.search_time, 6), "n_groups": res.n_groups,
                "root_h": res.root_h, "root_goal_sum": res.root_goal_sum,
                "termination_ok": termination_ok(res) if res.optimal else "",
            }
            for p in PHASES:
                row[f"time_{p}"] = round(res.phase_times[p], 6)
            rows.append(row)
    return rows


def termination_ok(res) -> int:
    """1 when the returned TPG is acyclic and costs what the terminating node promised."""
    graph = ReducedGraph(res.tpg)
    order = topological_order(graph)
    if order is None:
        return 0
    cost = forward_from_order(graph, order).goal_sum(res.tpg.layout.goals)
    return int(cost == res.cost == res.terminal_cost)


def run_bench(cfg: BenchConfig) -> list[dict]:
    tasks = [(m, n, i, cfg) for m in cfg.maps for n in cfg.agents for i in range(cfg.instances)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(run_instance, tasks))
    else:
        chunks = [run_instance(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def aggregate(rows: list[dict]) -> list[dict]:
    """Success rate over all runs; means over solved runs."""
    buckets = defaultdict(list)
    for r in rows:
        buckets[(r["map"], r["agents"], r["config"])].append(r)
    out = []
    for (m, n, c), rs in sorted(buckets.items()):
        solved = [r for r in rs if r["success"]]
        mean = lambda key: sum(r[key] for r in solved) / len(solved) if solved else None
        out.append({"map": m, "agents": n, "config": c, "runs": len(rs), "solved": len(solved),
                    "success_rate": len(solved) / len(rs), "mean_search_time_s": mean("search_time_s"),
                    "mean_expanded_nodes": mean("expanded_nodes")})
    return out


def mutual_comparison(rows: list[dict], a: str, b: str) -> dict:
    """Compare two configurations on the instances both solved."""
    by = defaultdict(dict)
    for r in rows:
        by[r["instance_id"]][r["config"]] = r
    both = [(d[a], d[b]) for d in by.values() if a in d and b in d and d[a]["success"] and d[b]["success"]]
    n = len(both)
    mean = lambda i, key: sum(pair[i][key] for pair in both) / n if n else float("nan")
    return {
        "mutual": n,
        "cost_mismatches": sum(1 for x, y in both if x["cost"] != y["cost"]),
        f"{a}_expanded": mean(0, "expanded_nodes"), f"{b}_expanded": mean(1, "expanded_nodes"),
        f"{a}_time": mean(0, "search_time_s"), f"{b}_time": mean(1, "search_time_s"),
    }


def write_csv(rows: list[dict], stream) -> None:
    writer = csv.DictWriter(stream, ROW_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    stream.write("\n# aggregate\n")
    agg = csv.DictWriter(stream, AGG_FIELDS, lineterminator="\n")
    agg.writeheader()
    agg.writerows(aggregate(rows))


def read_csv(stream) -> tuple[list[dict], list[dict]]:
    text = stream.read()
    rows_part, _, agg_part = text.partition("\n# aggregate\n")
    rows = list(csv.DictReader(rows_part.splitlines()))
    agg = list(csv.DictReader(agg_part.splitlines()))
    return rows, agg
