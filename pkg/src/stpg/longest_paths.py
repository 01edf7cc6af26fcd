"""Forward and backward longest path lengths on reduced TPGs.

Forward lengths ``L(v)`` are earliest arrival times.  Backward lengths
``L(v, g_k)`` are stored in a ``(n_vertices, n_goals)`` integer matrix with
:data:`UNREACHABLE` marking vertices that have no path to goal ``g_k``.
"""
from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import CycleEncountered
from .graph import topological_order

UNREACHABLE = -1


@dataclass
class LongestPathState:
    forward: list[int]
    backward: np.ndarray | None = None
    topo_order: list[int] | None = None

    def copy(self) -> "LongestPathState":
        back = None if self.backward is None else self.backward.copy()
        return LongestPathState(list(self.forward), back, self.topo_order)

    def goal_sum(self, goals) -> int:
        return sum(self.forward[g] for g in goals)


def flpl(graph) -> LongestPathState:
    order = topological_order(graph)
    if order is None:
        raise CycleEncountered("forward longest paths need an acyclic graph")
    return forward_from_order(graph, order)


def forward_from_order(graph, order) -> LongestPathState:
    forward = [0] * graph.n_vertices
    for v in order:
        best = 0
        for u, w in graph.preds(v):
            cand = forward[u] + w
            if cand > best:
                best = cand
        forward[v] = best
    return LongestPathState(forward, None, order)


def _fresh_row(graph, v: int, goal_col: dict) -> np.ndarray:
    row = np.full(len(graph.goals), UNREACHABLE, dtype=np.int64)
    for col in goal_col.get(v, ()):
        row[col] = 0
    return row


def _goal_columns(graph) -> dict:
    cols: dict[int, list[int]] = {}
    for k, g in enumerate(graph.goals):
        cols.setdefault(g, []).append(k)
    return cols


def _relax_row(row: np.ndarray, succ_row: np.ndarray, w: int) -> None:
    reach = succ_row != UNREACHABLE
    if reach.any():
        np.maximum(row, np.where(reach, succ_row + w, UNREACHABLE), out=row)


def blpl(graph, topo_order) -> np.ndarray:
    """Backward longest path lengths to every goal, swept in reverse topological order."""
    goal_col = _goal_columns(graph)
    back = np.full((graph.n_vertices, len(graph.goals)), UNREACHABLE, dtype=np.int64)
    for v in reversed(topo_order):
        row = _fresh_row(graph, v, goal_col)
        for u, w in graph.succs(v):
            _relax_row(row, back[u], w)
        back[v] = row
    return back


def longest_paths(graph, backward: bool = True) -> LongestPathState:
    state = flpl(graph)
    if backward:
        state.backward = blpl(graph, state.topo_order)
    return state


def _insert_one(forward: list[int], graph, src: int, dst: int, w: int, pending: Counter) -> None:
    if forward[src] + w <= forward[dst]:
        return
    heap = [(forward[dst], dst)]
    visited = {dst}
    while heap:
        _, v = heapq.heappop(heap)
        best = 0
        skipped: Counter = Counter()
        for u, wu in graph.preds(v):
            key = (u, v, wu)
            # only the not-yet-inserted copies of a parallel edge are hidden
            if skipped[key] < pending[key]:
                skipped[key] += 1
                continue
            cand = forward[u] + wu
            if cand > best:
                best = cand
        if best == forward[v]:
            continue
        forward[v] = best
        for s, _ in graph.succs(v):
            if s == src:
                raise CycleEncountered(f"edge {src}->{dst} closes a cycle")
            if s not in visited:
                visited.add(s)
                heapq.heappush(heap, (forward[s], s))


def flpl_incremental(forward: list[int], graph, new_edges) -> list[int]:
    """Forward lengths after ``new_edges`` were added to ``graph``.

    ``graph`` already contains the new edges and ``forward`` is valid for the
    graph without them.  Edges are inserted one at a time: the heap orders
    vertices by their lengths before the current insertion, which is a
    topological order only while a single edge is being absorbed.
    """
    forward = list(forward)
    pending = Counter((u, v, w) for u, v, w in new_edges)
    for u, v, w in new_edges:
        pending[(u, v, w)] -= 1
        _insert_one(forward, graph, u, v, w, pending)
    return forward


def blpl_incremental(backward: np.ndarray, forward: list[int], graph, new_edges) -> np.ndarray:
    """Backward lengths after ``new_edges`` were added to ``graph``.

    ``forward`` must already be the forward lengths of the new graph; they
    strictly increase along every edge, so popping the largest first visits
    each affected vertex after all of its affected successors.
    """
    back = backward.copy()
    goal_col = _goal_columns(graph)
    heap = []
    visited = set()
    for u, _, _ in new_edges:
        if u not in visited:
            visited.add(u)
            heap.append((-forward[u], -u))
    heapq.heapify(heap)
    while heap:
        _, neg_v = heapq.heappop(heap)
        v = -neg_v
        row = _fresh_row(graph, v, goal_col)
        for u, w in graph.succs(v):
            _relax_row(row, back[u], w)
        if np.array_equal(row, back[v]):
            continue
        back[v] = row
        for p, _ in graph.preds(v):
            if p not in visited:
                visited.add(p)
                heapq.heappush(heap, (-forward[p], -p))
    return back
