"""Grid maps in MovingAI ``.map`` format and a small prioritized planner used to supply benchmark plans."""
from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass

from .plan import MapfPlan, build_tpg, merge_path, validate_plan
from .graph import simulate_execution

PASSABLE = set(".GS")


@dataclass
class GridMap:
    height: int
    width: int
    blocked: frozenset

    def passable(self, loc) -> bool:
        if not isinstance(loc, tuple) or len(loc) != 2:
            return False
        r, c = loc
        return 0 <= r < self.height and 0 <= c < self.width and loc not in self.blocked

    def adjacent(self, a, b) -> bool:
        return a == b or abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1

    def neighbors(self, loc):
        r, c = loc
        for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if self.passable(nb):
                yield nb

    def free_cells(self) -> list[tuple[int, int]]:
        return [(r, c) for r in range(self.height) for c in range(self.width) if (r, c) not in self.blocked]


def parse_map(text: str) -> GridMap:
    lines = text.splitlines()
    header = {}
    i = 0
    while i < len(lines) and lines[i].strip() != "map":
        parts = lines[i].split()
        if len(parts) == 2:
            header[parts[0]] = parts[1]
        i += 1
    if i == len(lines):
        raise ValueError("map file lacks the 'map' line")
    height, width = int(header["height"]), int(header["width"])
    rows = lines[i + 1:i + 1 + height]
    if len(rows) != height or any(len(r) < width for r in rows):
        raise ValueError("map body does not match the declared size")
    blocked = frozenset((r, c) for r in range(height) for c in range(width) if rows[r][c] not in PASSABLE)
    return GridMap(height, width, blocked)


def format_map(grid: GridMap) -> str:
    rows = ["".join("@" if (r, c) in grid.blocked else "." for c in range(grid.width)) for r in range(grid.height)]
    return "\n".join(["type octile", f"height {grid.height}", f"width {grid.width}", "map", *rows]) + "\n"


def random_grid(height: int, width: int, obstacle_ratio: float, rng: random.Random) -> GridMap:
    """Random obstacles; cells cut off from the largest free component are blocked too."""
    cells = [(r, c) for r in range(height) for c in range(width)]
    blocked = set(rng.sample(cells, int(round(obstacle_ratio * len(cells)))))
    grid = GridMap(height, width, frozenset(blocked))
    seen, best = set(), []
    for cell in grid.free_cells():
        if cell in seen:
            continue
        comp, queue = [cell], deque([cell])
        seen.add(cell)
        while queue:
            for nb in grid.neighbors(queue.popleft()):
                if nb not in seen:
                    seen.add(nb)
                    comp.append(nb)
                    queue.append(nb)
        if len(comp) > len(best):
            best = comp
    keep = set(best)
    return GridMap(height, width, frozenset(c for c in cells if c not in keep))


def _distances(grid: GridMap, goal) -> dict:
    dist = {goal: 0}
    queue = deque([goal])
    while queue:
        u = queue.popleft()
        for nb in grid.neighbors(u):
            if nb not in dist:
                dist[nb] = dist[u] + 1
                queue.append(nb)
    return dist


class _Reservations:
    def __init__(self):
        self.at: dict = {}
        self.parked: dict = {}

    def occupied(self, loc, t) -> bool:
        if (loc, t) in self.at:
            return True
        since = self.parked.get(loc)
        return since is not None and t >= since

    def last_use(self, loc) -> int:
        times = [t for (l, t) in self.at if l == loc]
        return max(times, default=-1)

    def add(self, path):
        for t, loc in enumerate(path):
            self.at[(loc, t)] = True
        self.parked[path[-1]] = len(path) - 1


def _space_time_astar(grid, start, goal, res: _Reservations, horizon: int):
    dist = _distances(grid, goal)
    if start not in dist or res.occupied(start, 0) or res.occupied(start, 1):
        return None
    earliest_park = res.last_use(goal) + 2
    if goal in res.parked:
        return None
    open_ = [(dist[start], 0, start)]
    parent = {(start, 0): None}
    while open_:
        _, t, loc = heapq.heappop(open_)
        if loc == goal and t >= earliest_park - 1 and not any(res.occupied(goal, tt) for tt in range(t, t + 2)):
            path, key = [], (loc, t)
            while key is not None:
                path.append(key[0])
                key = parent[key]
            return path[::-1]
        if t >= horizon:
            continue
        for nxt in (loc, *grid.neighbors(loc)):
            key = (nxt, t + 1)
            if key in parent:
                continue
            if res.occupied(nxt, t + 1) or res.occupied(nxt, t + 2):
                continue
            if nxt != loc and res.occupied(nxt, t):
                continue
            parent[key] = (loc, t)
            heapq.heappush(open_, (t + 1 + dist[nxt], t + 1, nxt))
    return None


def compact_plan(plan: MapfPlan) -> MapfPlan:
    """Replace waits by the earliest TPG execution of the same visiting orders."""
    tpg = build_tpg(plan)
    times = simulate_execution(tpg).vertex_times
    lay = tpg.layout
    paths = []
    for a, path in enumerate(plan.paths):
        locs, _ = merge_path(path)
        arrive = [times[lay.vid(a, s)] for s in range(len(locs))]
        out, s = [], 0
        for t in range(arrive[-1] + 1):
            while s + 1 < len(locs) and arrive[s + 1] <= t:
                s += 1
            out.append(locs[s])
        paths.append(out)
    return MapfPlan(paths)


def plan_agents(grid: GridMap, n_agents: int, rng: random.Random, horizon: int | None = None,
                attempts: int = 10) -> MapfPlan | None:
    """Prioritized space-time A* avoiding vertex and following conflicts; returns a compacted plan."""
    horizon = horizon or 4 * (grid.height + grid.width)
    cells = grid.free_cells()
    for _ in range(attempts):
        picks = rng.sample(cells, 2 * n_agents)
        starts, goals = picks[:n_agents], picks[n_agents:]
        res = _Reservations()
        paths = [None] * n_agents
        order = list(range(n_agents))
        rng.shuffle(order)
        # starts are occupied at t=0 by everyone
        for a in order:
            res.at[(starts[a], 0)] = True
        ok = True
        for a in order:
            del res.at[(starts[a], 0)]
            path = _space_time_astar(grid, starts[a], goals[a], res, horizon)
            if path is None:
                ok = False
                break
            res.add(path)
            paths[a] = path
        if not ok:
            continue
        plan = MapfPlan(paths)
        if not validate_plan(plan, grid).ok:
            continue
        plan = compact_plan(plan)
        if validate_plan(plan, grid).ok:
            return plan
    return None
