"""Edge grouping within ordered agent pairs.

Inside one ordered pair (first, second) an edge is written ``(m, n)``: the
directed Type-2 edge from step ``m`` of ``first`` to step ``n`` of
``second``.  Its reversed edge runs from step ``n + 1`` of ``second`` back to
step ``m - 1`` of ``first``; written in the swapped frame that is again an
``(m, n)`` tuple, so :func:`reverse_edge` is an involution.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Direction, EdgeState, Stpg, Type2Pair, settle

Edge = tuple[int, int]


def reverse_edge(e: Edge) -> Edge:
    m, n = e
    return (n + 1, m - 1)


def pair_to_edge(pair: Type2Pair) -> Edge:
    return (pair.before_step + 1, pair.after_step)


@dataclass(frozen=True)
class OrderedPairSubgraph:
    first: int
    second: int
    edges: tuple[Edge, ...]
    pair_ids: tuple[int, ...] = ()
    sizes: tuple[int, int] | None = None


@dataclass(frozen=True)
class EdgeGroup:
    first: int
    second: int
    members: tuple[Edge, ...]
    group_id: int = 0


def find_cycle_edges(edges, reversed_edges) -> set[Edge]:
    """Edges that close a two-edge cycle with some already reversed edge."""
    found = set()
    for e in edges:
        m, n = e
        for q, p in reversed_edges:
            if p <= m and n <= q:
                found.add(e)
                break
    return found


def propagate(edges, e: Edge) -> set[Edge]:
    """All edges that must be reversed once ``e`` is reversed."""
    forced = {e}
    frontier = {e}
    rest = set(edges) - {e}
    while frontier:
        frontier = find_cycle_edges(rest, [reverse_edge(c) for c in frontier])
        forced |= frontier
        rest -= frontier
    return forced


def find_groupable_edges(edges, e: Edge) -> set[Edge]:
    follow_reverse = propagate(edges, e)
    flipped = propagate([reverse_edge(x) for x in edges], reverse_edge(e))
    follow_fix = {reverse_edge(x) for x in flipped}
    return follow_reverse & follow_fix


def edge_grouping(sub: OrderedPairSubgraph) -> list[EdgeGroup]:
    """Maximal groups of edges that settle in the same direction in every acyclic outcome."""
    all_edges = sorted(set(sub.edges))
    remaining = set(all_edges)
    groups = []
    for e in all_edges:
        if e not in remaining:
            continue
        members = find_groupable_edges(sorted(remaining), e)
        remaining -= members
        groups.append(EdgeGroup(sub.first, sub.second, tuple(sorted(members)), len(groups)))
    return groups


def simple_grouping(sub: OrderedPairSubgraph) -> list[EdgeGroup]:
    """Merge neighbouring parallel ``(m+1, n+1)`` and crossing ``(m+1, n-1)`` edges."""
    edges = sorted(set(sub.edges))
    parent = {e: e for e in edges}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m, n in edges:
        for nb in ((m + 1, n + 1), (m + 1, n - 1)):
            if nb in parent:
                ra, rb = find((m, n)), find(nb)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    buckets: dict[Edge, list[Edge]] = {}
    for e in edges:
        buckets.setdefault(find(e), []).append(e)
    ordered = sorted(buckets.values(), key=lambda g: g[0])
    return [EdgeGroup(sub.first, sub.second, tuple(g), i) for i, g in enumerate(ordered)]


def ordered_pair_subgraphs(stpg: Stpg) -> dict[tuple[int, int], OrderedPairSubgraph]:
    """Every Type-2 pair, switchable or not, bucketed by (before agent, after agent)."""
    buckets: dict[tuple[int, int], list[int]] = {}
    for k, pr in enumerate(stpg.pairs):
        buckets.setdefault((pr.before_agent, pr.after_agent), []).append(k)
    sizes = stpg.layout.sizes
    subs = {}
    for (a, b), ids in sorted(buckets.items()):
        edges = tuple(pair_to_edge(stpg.pairs[k]) for k in ids)
        subs[(a, b)] = OrderedPairSubgraph(a, b, edges, tuple(ids), (sizes[a], sizes[b]))
    return subs


@dataclass
class Grouping:
    """Groups of pair indices of one STPG layout; ``group_of[k]`` is the group holding pair ``k``."""

    groups: list[list[int]]
    group_of: list[int] = field(default_factory=list)
    method: str = "full"

    def __post_init__(self):
        if not self.group_of and self.groups:
            n = max(k for g in self.groups for k in g) + 1
            self.group_of = [-1] * n
            for gid, g in enumerate(self.groups):
                for k in g:
                    self.group_of[k] = gid

    def members(self, k: int) -> list[int]:
        if k >= len(self.group_of) or self.group_of[k] < 0:
            return [k]
        return self.groups[self.group_of[k]]

    def __len__(self):
        return len(self.groups)


def group_stpg(stpg: Stpg, method: str = "full") -> Grouping:
    if method not in ("full", "simple"):
        raise ValueError(f"unknown grouping method {method!r}")
    fn = edge_grouping if method == "full" else simple_grouping
    groups = []
    for sub in ordered_pair_subgraphs(stpg).values():
        by_edge: dict[Edge, list[int]] = {}
        for k, e in zip(sub.pair_ids, sub.edges):
            by_edge.setdefault(e, []).append(k)
        for g in fn(sub):
            groups.append(sorted(k for e in g.members for k in by_edge[e]))
    return Grouping(groups, [], method)


def count_switchable_groups(stpg: Stpg, grouping: Grouping) -> int:
    return sum(1 for g in grouping.groups if any(stpg.states[k] == EdgeState.SWITCHABLE for k in g))


def presettle(stpg: Stpg, grouping: Grouping) -> Stpg:
    """Settle switchable members of any group that already holds a settled pair, in that pair's direction."""
    for g in grouping.groups:
        settled = [stpg.states[k] for k in g if stpg.states[k] != EdgeState.SWITCHABLE]
        if not settled:
            continue
        open_ = [k for k in g if stpg.states[k] == EdgeState.SWITCHABLE]
        if open_:
            direction = Direction.FIX if settled[0] == EdgeState.FIXED else Direction.REVERSE
            stpg = settle(stpg, open_, direction)
    return stpg
