"""Brute-force reference engines.  Slow on purpose; used by tests and the ``oracle`` command."""
from __future__ import annotations

import itertools
import random

import numpy as np

from .errors import CycleEncountered, TooLarge
from .graph import DiGraph, EdgeState, ReducedGraph, Stpg, has_cycle, topological_order
from .grouping import EdgeGroup, OrderedPairSubgraph, reverse_edge
from .longest_paths import UNREACHABLE


def enumerate_optimal(stpg: Stpg, cap: int = 20) -> tuple[int | None, int]:
    """Minimum execution cost over all acyclic settlements and how many settlements are acyclic."""
    best, _, count = enumerate_settlements(stpg, cap)
    return best, count


def enumerate_settlements(stpg: Stpg, cap: int = 20):
    open_ = stpg.switchable()
    if len(open_) > cap:
        raise TooLarge(f"{len(open_)} switchable pairs exceed the enumeration cap of {cap}")
    goals = stpg.layout.goals
    best, best_states, count = None, None, 0
    base = bytearray(stpg.states)
    for choice in itertools.product((EdgeState.FIXED, EdgeState.REVERSED), repeat=len(open_)):
        for k, st in zip(open_, choice):
            base[k] = st
        candidate = Stpg(stpg.locs, stpg.costs, states=bytes(base), layout=stpg.layout)
        graph = ReducedGraph(candidate)
        if topological_order(graph) is None:
            continue
        count += 1
        forward, _ = naive_longest_paths(graph, backward=False)
        cost = sum(forward[g] for g in goals)
        if best is None or cost < best:
            best, best_states = cost, bytes(base)
    return best, best_states, count


def naive_longest_paths(graph, backward: bool = True):
    """Relax every edge until nothing changes; a cycle shows up as an endless relaxation."""
    n = graph.n_vertices
    edges = graph.edges()
    forward = [0] * n
    for _ in range(n + 1):
        changed = False
        for u, v, w in edges:
            if forward[u] + w > forward[v]:
                forward[v] = forward[u] + w
                changed = True
        if not changed:
            break
    else:
        raise CycleEncountered("relaxation did not settle")
    if not backward:
        return forward, None
    goals = list(graph.goals)
    back = np.full((n, len(goals)), UNREACHABLE, dtype=np.int64)
    for k, g in enumerate(goals):
        col = [None] * n
        col[g] = 0
        for _ in range(n + 1):
            changed = False
            for u, v, w in edges:
                if col[v] is not None and (col[u] is None or col[v] + w > col[u]):
                    col[u] = col[v] + w
                    changed = True
            if not changed:
                break
        else:
            raise CycleEncountered("relaxation did not settle")
        for v in range(n):
            if col[v] is not None:
                back[v, k] = col[v]
    return forward, back


def two_agent_graph(edges, directions, sizes) -> DiGraph:
    """Chains for both agents plus each edge in its chosen direction (True = reversed)."""
    na, nb = sizes
    g = DiGraph(na + nb)
    for s in range(na - 1):
        g.add_edge(s, s + 1)
    for s in range(nb - 1):
        g.add_edge(na + s, na + s + 1)
    for e, rev in zip(edges, directions):
        if rev:
            q, p = reverse_edge(e)
            g.add_edge(na + q, p)
        else:
            m, n = e
            g.add_edge(m, na + n)
    return g


def subgraph_sizes(edges) -> tuple[int, int]:
    if min(m for m, _ in edges) < 1:
        raise ValueError("edges need m >= 1 so that their reversal exists")
    return max(m for m, _ in edges) + 1, max(n for _, n in edges) + 2


def acyclic_settlements(sub: OrderedPairSubgraph, cap: int = 12) -> list[tuple[bool, ...]]:
    edges = list(sub.edges)
    if len(edges) > cap:
        raise TooLarge(f"{len(edges)} edges exceed the enumeration cap of {cap}")
    sizes = subgraph_sizes(edges)
    if sub.sizes is not None:
        sizes = (max(sizes[0], sub.sizes[0]), max(sizes[1], sub.sizes[1]))
    out = []
    for dirs in itertools.product((False, True), repeat=len(edges)):
        if not has_cycle(two_agent_graph(edges, dirs, sizes)):
            out.append(dirs)
    return out


def verify_groups(sub: OrderedPairSubgraph, groups: list[EdgeGroup], cap: int = 12,
                  maximal: bool = True) -> str | None:
    """``None`` when the groups are sound (and maximal), otherwise a description of a counterexample."""
    edges = list(sub.edges)
    index = {e: i for i, e in enumerate(edges)}
    seen = [m for g in groups for m in g.members]
    if sorted(seen) != sorted(edges):
        return "groups do not partition the edges"
    settlements = acyclic_settlements(sub, cap)
    for g in groups:
        ids = [index[m] for m in g.members]
        for dirs in settlements:
            if len({dirs[i] for i in ids}) > 1:
                return f"group {g.members} splits in acyclic settlement {dirs}"
    if not maximal:
        return None
    reps = [index[g.members[0]] for g in groups]
    for a, b in itertools.combinations(range(len(groups)), 2):
        ra, rb = reps[a], reps[b]
        if not any(d[ra] != d[rb] for d in settlements):
            return f"groups {groups[a].members} and {groups[b].members} never disagree; not maximal"
    return None


def forced_partner_edges(sub: OrderedPairSubgraph, e, cap: int = 12) -> set:
    """Edges whose direction equals that of ``e`` in every acyclic settlement."""
    edges = list(sub.edges)
    i = edges.index(e)
    settlements = acyclic_settlements(sub, cap)
    return {x for j, x in enumerate(edges) if all(d[j] == d[i] for d in settlements)}


def exact_ewmvc(weights, half: bool = False, cap: int = 8):
    """Minimum of sum(x) subject to x_i + x_j >= w_ij and x >= 0 over integers (or half-integers)."""
    w = np.asarray(weights, dtype=np.int64)
    w = np.maximum(w, w.T)
    np.fill_diagonal(w, 0)
    n = w.shape[0]
    if n > cap:
        raise TooLarge(f"{n} agents exceed the EWMVC cap of {cap}")
    if half:
        return exact_ewmvc(2 * w, False, cap) / 2
    order = sorted(range(n), key=lambda i: -int(w[i].sum()))
    x = [0] * n
    best = [int(w.max(axis=1).sum()) if n else 0]

    def lower_bound(idx):
        rest = order[idx:]
        done = order[:idx]
        lb = {j: max([0] + [int(w[j, i]) - x[i] for i in done]) for j in rest}
        # any single residual edge still has to be covered by its two endpoints
        resid = max([0] + [int(w[a, b]) - lb[a] - lb[b] for a, b in itertools.combinations(rest, 2)])
        return sum(lb.values()) + resid

    def dfs(idx, total):
        if idx == n:
            best[0] = min(best[0], total)
            return
        if total + lower_bound(idx) >= best[0]:
            return
        v = order[idx]
        lo = max([0] + [int(w[v, i]) - x[i] for i in order[:idx]])
        hi = max([lo] + [int(w[v, j]) for j in order[idx + 1:]])
        for val in range(lo, hi + 1):
            x[v] = val
            dfs(idx + 1, total + val)
        x[v] = 0

    dfs(0, 0)
    return best[0]


def small_instances(count: int, seed: int = 0, max_switchable: int = 10):
    """Random 2-4 agent grid instances with random delays and 1..max_switchable switchable pairs.

    Yields ``(plan, scenario, stpg)``.
    """
    from .gridmap import plan_agents, random_grid
    from .plan import apply_delays, build_tpg, generate_scenario, to_stpg

    rng = random.Random(seed)
    made = 0
    while made < count:
        side = rng.randint(4, 6)
        grid = random_grid(side, side, 0.1, rng)
        plan = plan_agents(grid, rng.randint(2, 4), rng, attempts=3)
        if plan is None:
            continue
        tpg = build_tpg(plan)
        scenario = generate_scenario(plan, rng.choice((0.1, 0.3)), rng.randrange(1 << 30), (1, 6),
                                     mode=rng.choice(("first", "full")))
        stpg = to_stpg(apply_delays(tpg, scenario))
        if 1 <= len(stpg.switchable()) <= max_switchable:
            made += 1
            yield plan, scenario, stpg
