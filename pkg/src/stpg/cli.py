"""``stpg`` command line.  Exit codes: 0 ok, 1 usage, 2 validation, 3 timeout, 4 internal."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench, formats
from .errors import (DelayIndexOutOfRange, GroupsFileError, InfeasibleInput, MalformedPlan, PlanConflict,
                     TooLarge)
from .graph import simulate_execution
from .gridmap import parse_map
from .grouping import group_stpg
from .oracle import enumerate_optimal
from .plan import apply_delays, build_tpg, generate_scenario, to_stpg, validate_plan
from .search import BRANCHINGS, GROUPINGS, HEURISTICS, LONGEST_PATHS, SearchConfig, optimize

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_TIMEOUT, EXIT_INTERNAL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_plan(path: str, map_path: str | None = None):
    plan = formats.parse_plan(_read(path))
    grid = parse_map(_read(map_path)) if map_path else None
    return plan, grid


def cmd_validate(args) -> int:
    plan, grid = _load_plan(args.plan, args.map)
    report = validate_plan(plan, grid)
    out = {"ok": report.ok, "conflicts": [
        {"kind": c.kind, "timestep": c.timestep, "agents": list(c.agents), "location": formats.format_location(c.location)}
        for c in report.conflicts]}
    _write(None, formats.dump_json(out))
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_build(args) -> int:
    plan, grid = _load_plan(args.plan, args.map)
    if grid is not None:
        report = validate_plan(plan, grid)
        if not report.ok:
            raise PlanConflict(report.conflicts)
    tpg = build_tpg(plan)
    _write(args.output, formats.dump_json(formats.tpg_to_json(tpg, simulate_execution(tpg))))
    return EXIT_OK


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError as exc:
        raise UsageError(f"--range expects lo:hi, got {text!r}") from exc


def cmd_delay(args) -> int:
    plan, _ = _load_plan(args.plan)
    try:
        scenario = generate_scenario(plan, args.p, args.seed, _range(args.range), args.mode, args.retries)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(args.output, formats.format_scenario(scenario))
    return EXIT_OK


def cmd_group(args) -> int:
    plan, _ = _load_plan(args.plan)
    stpg = to_stpg(build_tpg(plan))
    grouping = group_stpg(stpg, args.method)
    _write(args.output, formats.dump_json(formats.groups_to_json(grouping, stpg, plan)))
    return EXIT_OK


def _delayed_stpg(args):
    plan, _ = _load_plan(args.plan)
    scenario = formats.parse_scenario(_read(args.scenario))
    return plan, to_stpg(apply_delays(build_tpg(plan), scenario))


def cmd_optimize(args) -> int:
    plan, stpg = _delayed_stpg(args)
    overrides = {k: v for k, v in (("grouping", args.grouping), ("branching", args.branching),
                                   ("heuristic", args.heuristic), ("longest_path", args.lp)) if v is not None}
    config = SearchConfig.preset(args.algo, time_limit=args.time_limit, seed=args.seed, **overrides)
    groups = None
    if args.groups:
        groups = formats.groups_from_json(json.loads(_read(args.groups)), stpg, plan)
    result = optimize(stpg, groups, config)
    _write(args.output, formats.dump_json(formats.result_to_json(result, config)))
    if result.outcome == "timeout":
        return EXIT_TIMEOUT
    return EXIT_OK if result.optimal else EXIT_INVALID


def cmd_bench(args) -> int:
    cfg = bench.BenchConfig.from_json(json.loads(_read(args.config)))
    if args.workers is not None:
        cfg.workers = args.workers
    rows = bench.run_bench(cfg)
    if args.output in (None, "-"):
        bench.write_csv(rows, sys.stdout)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            bench.write_csv(rows, fh)
    return EXIT_OK


def cmd_oracle(args) -> int:
    _, stpg = _delayed_stpg(args)
    best, count = enumerate_optimal(stpg, args.cap)
    _write(args.output, formats.dump_json({"min_cost": best, "acyclic_count": count}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stpg", description="Optimal acyclic TPGs from switchable TPGs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a plan for vertex and following conflicts")
    s.add_argument("plan")
    s.add_argument("--map")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("build", help="write the TPG of a plan")
    s.add_argument("plan")
    s.add_argument("--map")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("delay", help="draw a delay scenario")
    s.add_argument("plan")
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--range", default="10:20")
    s.add_argument("--mode", choices=("first", "full"), default="first")
    s.add_argument("--retries", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_delay)

    s = sub.add_parser("group", help="precompute edge groups of a plan")
    s.add_argument("plan")
    s.add_argument("--method", choices=("full", "simple"), default="full")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_group)

    s = sub.add_parser("optimize", help="search for the minimum-cost acyclic TPG")
    s.add_argument("plan")
    s.add_argument("scenario")
    s.add_argument("--groups")
    s.add_argument("--algo", choices=("gses", "igses"), default="igses")
    s.add_argument("--grouping", choices=GROUPINGS)
    s.add_argument("--branching", choices=BRANCHINGS)
    s.add_argument("--heuristic", choices=HEURISTICS)
    s.add_argument("--lp", choices=LONGEST_PATHS)
    s.add_argument("--time-limit", type=float, default=16.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("bench", help="run a benchmark sweep")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("oracle", help="brute-force minimum over all settlements")
    s.add_argument("plan")
    s.add_argument("scenario")
    s.add_argument("--cap", type=int, default=20)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_oracle)
    return p


def _fail(code: int, kind: str, message: str, **extra) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except PlanConflict as exc:
        return _fail(EXIT_INVALID, "PlanConflict", str(exc), conflicts=len(exc.conflicts))
    except (MalformedPlan, GroupsFileError, DelayIndexOutOfRange, InfeasibleInput, TooLarge) as exc:
        return _fail(EXIT_INVALID, type(exc).__name__, str(exc))
    except (ValueError, KeyError) as exc:
        return _fail(EXIT_INVALID, type(exc).__name__, str(exc))
    except Exception as exc:  # noqa: BLE001
        return _fail(EXIT_INTERNAL, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
