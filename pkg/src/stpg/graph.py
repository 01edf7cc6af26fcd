"""Temporal plan graphs (TPG) and switchable temporal plan graphs (STPG).

Vertices are numbered globally: agent ``a`` owns the contiguous id range
``offsets[a] .. offsets[a] + z_a``.  Type-1 edges chain an agent's vertices
and carry integer costs (a cost above 1 encodes a delay).  Every Type-2 pair
records two vertices of different agents at the same location together with
the order in which the plan visits them; its state says whether the order is
still open (switchable), kept (fixed) or flipped (reversed).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, NamedTuple, Sequence

from .errors import DeadlockDetected, SettleNonSwitchable

TYPE2_COST = 1


class EdgeState(IntEnum):
    SWITCHABLE = 0
    FIXED = 1
    REVERSED = 2


class Direction(IntEnum):
    FIX = 1
    REVERSE = 2


class VertexId(NamedTuple):
    agent: int
    step: int


@dataclass(frozen=True)
class Type2Pair:
    """Two same-location vertices; ``before`` visits first in the plan.

    Fixed form: ``(before, before_step + 1) -> (after, after_step)``.
    Reversed form: ``(after, after_step + 1) -> (before, before_step)``.
    """

    before_agent: int
    before_step: int
    after_agent: int
    after_step: int

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.before_agent, self.before_step, self.after_agent, self.after_step)


class Layout:
    """Vertex numbering and Type-2 incidence shared by every settlement of one STPG."""

    def __init__(self, sizes: Sequence[int], pairs: Sequence[Type2Pair]):
        self.sizes = tuple(sizes)
        self.n_agents = len(sizes)
        offsets = []
        total = 0
        for n in sizes:
            if n < 1:
                raise ValueError("every agent needs at least one vertex")
            offsets.append(total)
            total += n
        self.offsets = tuple(offsets)
        self.n_vertices = total
        self.starts = tuple(offsets)
        self.goals = tuple(o + n - 1 for o, n in zip(offsets, sizes))
        self.agent_of = [a for a, n in enumerate(sizes) for _ in range(n)]
        self.step_of = [s for n in sizes for s in range(n)]

        self.pairs = tuple(pairs)
        n = total
        self.fix_src, self.fix_dst, self.rev_src, self.rev_dst = [], [], [], []
        self.fix_in = [[] for _ in range(n)]
        self.fix_out = [[] for _ in range(n)]
        self.rev_in = [[] for _ in range(n)]
        self.rev_out = [[] for _ in range(n)]
        self.pair_index = {}
        for k, pr in enumerate(self.pairs):
            if pr.before_agent == pr.after_agent:
                raise ValueError(f"Type-2 pair {pr} joins an agent to itself")
            zb = sizes[pr.before_agent] - 1
            za = sizes[pr.after_agent] - 1
            if not (0 <= pr.before_step < zb and 0 <= pr.after_step <= za):
                # before_step == zb would need a vertex past the goal
                raise ValueError(f"Type-2 pair {pr} has no constructible fixed form")
            fs = self.vid(pr.before_agent, pr.before_step + 1)
            fd = self.vid(pr.after_agent, pr.after_step)
            rd = self.vid(pr.before_agent, pr.before_step)
            rs = self.vid(pr.after_agent, pr.after_step + 1) if pr.after_step < za else -1
            self.fix_src.append(fs)
            self.fix_dst.append(fd)
            self.rev_src.append(rs)
            self.rev_dst.append(rd)
            self.fix_out[fs].append(k)
            self.fix_in[fd].append(k)
            if rs >= 0:
                self.rev_out[rs].append(k)
                self.rev_in[rd].append(k)
            if pr.key in self.pair_index:
                raise ValueError(f"duplicate Type-2 pair {pr}")
            self.pair_index[pr.key] = k

    def vid(self, agent: int, step: int) -> int:
        return self.offsets[agent] + step

    def vertex(self, v: int) -> VertexId:
        return VertexId(self.agent_of[v], self.step_of[v])

    def reversible(self, k: int) -> bool:
        return self.rev_src[k] >= 0


class Stpg:
    """A switchable TPG.  Treat instances as values: :func:`settle` copies."""

    __slots__ = ("layout", "locs", "costs", "states")

    def __init__(self, locs, costs, pairs=(), states=None, layout=None):
        self.locs = tuple(tuple(seq) for seq in locs)
        self.costs = tuple(tuple(int(c) for c in seq) for seq in costs)
        for a, (lseq, cseq) in enumerate(zip(self.locs, self.costs)):
            if len(cseq) != len(lseq) - 1:
                raise ValueError(f"agent {a}: {len(lseq)} vertices need {len(lseq) - 1} edge costs")
            if any(c < 1 for c in cseq):
                raise ValueError(f"agent {a}: Type-1 edge costs must be >= 1")
        if len(self.locs) != len(self.costs):
            raise ValueError("locs and costs disagree on the number of agents")
        self.layout = layout if layout is not None else Layout([len(s) for s in self.locs], pairs)
        if states is None:
            states = bytes(len(self.layout.pairs))
        self.states = bytes(states)
        if len(self.states) != len(self.layout.pairs):
            raise ValueError("one state per Type-2 pair is required")
        for k, st in enumerate(self.states):
            if st != EdgeState.FIXED and not self.layout.reversible(k):
                raise ValueError(f"pair {self.layout.pairs[k]} cannot be reversed or left switchable")

    @property
    def n_agents(self) -> int:
        return self.layout.n_agents

    @property
    def n_vertices(self) -> int:
        return self.layout.n_vertices

    @property
    def pairs(self) -> tuple[Type2Pair, ...]:
        return self.layout.pairs

    def replace(self, *, costs=None, states=None) -> "Stpg":
        return type(self)(self.locs, self.costs if costs is None else costs,
                          states=self.states if states is None else states, layout=self.layout)

    def switchable(self) -> list[int]:
        return [k for k, st in enumerate(self.states) if st == EdgeState.SWITCHABLE]

    def count(self, state: EdgeState) -> int:
        return self.states.count(state)

    def edge_cost(self, agent: int, step: int) -> int:
        return self.costs[agent][step]

    def edge_endpoints(self, k: int, direction: Direction) -> tuple[int, int]:
        lay = self.layout
        if direction == Direction.FIX:
            return lay.fix_src[k], lay.fix_dst[k]
        return lay.rev_src[k], lay.rev_dst[k]

    def __eq__(self, other):
        return (isinstance(other, Stpg) and self.locs == other.locs and self.costs == other.costs
                and self.layout.pairs == other.layout.pairs and self.states == other.states)

    def __hash__(self):
        return hash((self.costs, self.states))

    def __repr__(self):
        return (f"{type(self).__name__}(agents={self.n_agents}, vertices={self.n_vertices}, "
                f"switchable={self.count(EdgeState.SWITCHABLE)}, settled={len(self.states) - self.count(EdgeState.SWITCHABLE)})")


class Tpg(Stpg):
    """An STPG without switchable pairs."""

    __slots__ = ()

    def __init__(self, locs, costs, pairs=(), states=None, layout=None):
        if states is None:
            n = len(layout.pairs) if layout is not None else len(pairs)
            states = bytes([EdgeState.FIXED]) * n
        super().__init__(locs, costs, pairs, states, layout)
        if EdgeState.SWITCHABLE in self.states:
            raise ValueError("a TPG has no switchable pairs")


def settle(stpg: Stpg, edges: Iterable[int], direction: Direction) -> Stpg:
    """Return a copy of ``stpg`` with the given switchable pairs fixed or reversed."""
    edges = list(edges)
    if not edges:
        return stpg
    states = bytearray(stpg.states)
    target = EdgeState.FIXED if direction == Direction.FIX else EdgeState.REVERSED
    for k in edges:
        if states[k] != EdgeState.SWITCHABLE:
            raise SettleNonSwitchable(f"pair {stpg.pairs[k]} is already {EdgeState(states[k]).name}")
        states[k] = target
    return stpg.replace(states=bytes(states))


def settled_edges(stpg: Stpg, edges: Iterable[int], direction: Direction) -> list[tuple[int, int, int]]:
    """Directed ``(src, dst, cost)`` edges that settling ``edges`` adds to the reduced view."""
    out = []
    for k in edges:
        s, d = stpg.edge_endpoints(k, direction)
        out.append((s, d, TYPE2_COST))
    return out


def fix_all(stpg: Stpg) -> Tpg:
    """Fix every remaining switchable pair.

    Callers must only do this when no switchable pair has negative slack; the
    result then has the same forward longest path lengths as the reduced view.
    """
    states = bytes(EdgeState.FIXED if st == EdgeState.SWITCHABLE else st for st in stpg.states)
    return Tpg(stpg.locs, stpg.costs, states=states, layout=stpg.layout)


class ReducedGraph:
    """Type-1 edges plus the settled Type-2 edges of an STPG; switchable pairs are omitted."""

    def __init__(self, stpg: Stpg):
        self.stpg = stpg
        lay = stpg.layout
        self.layout = lay
        self.n_vertices = lay.n_vertices
        self.goals = lay.goals
        self.starts = lay.starts

    def preds(self, v: int) -> list[tuple[int, int]]:
        lay = self.layout
        st = self.stpg.states
        out = []
        step = lay.step_of[v]
        if step > 0:
            out.append((v - 1, self.stpg.costs[lay.agent_of[v]][step - 1]))
        for k in lay.fix_in[v]:
            if st[k] == EdgeState.FIXED:
                out.append((lay.fix_src[k], TYPE2_COST))
        for k in lay.rev_in[v]:
            if st[k] == EdgeState.REVERSED:
                out.append((lay.rev_src[k], TYPE2_COST))
        return out

    def succs(self, v: int) -> list[tuple[int, int]]:
        lay = self.layout
        st = self.stpg.states
        out = []
        a = lay.agent_of[v]
        step = lay.step_of[v]
        if step < lay.sizes[a] - 1:
            out.append((v + 1, self.stpg.costs[a][step]))
        for k in lay.fix_out[v]:
            if st[k] == EdgeState.FIXED:
                out.append((lay.fix_dst[k], TYPE2_COST))
        for k in lay.rev_out[v]:
            if st[k] == EdgeState.REVERSED:
                out.append((lay.rev_dst[k], TYPE2_COST))
        return out

    def edges(self) -> list[tuple[int, int, int]]:
        return [(u, v, w) for u in range(self.n_vertices) for v, w in self.succs(u)]


def reduced_view(stpg: Stpg) -> ReducedGraph:
    return ReducedGraph(stpg)


class DiGraph:
    """Plain weighted digraph with the same query surface as :class:`ReducedGraph`."""

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int, int]] = (), goals: Sequence[int] = ()):
        self.n_vertices = n_vertices
        self.goals = tuple(goals)
        self._pred = [[] for _ in range(n_vertices)]
        self._succ = [[] for _ in range(n_vertices)]
        for u, v, w in edges:
            self.add_edge(u, v, w)

    def add_edge(self, u: int, v: int, w: int = 1) -> None:
        self._succ[u].append((v, w))
        self._pred[v].append((u, w))

    def preds(self, v: int) -> list[tuple[int, int]]:
        return self._pred[v]

    def succs(self, v: int) -> list[tuple[int, int]]:
        return self._succ[v]

    def edges(self) -> list[tuple[int, int, int]]:
        return [(u, v, w) for u in range(self.n_vertices) for v, w in self._succ[u]]

    def copy(self) -> "DiGraph":
        return DiGraph(self.n_vertices, self.edges(), self.goals)


def topological_order(graph) -> list[int] | None:
    """Kahn's algorithm; ``None`` when the graph has a directed cycle."""
    n = graph.n_vertices
    indeg = [len(graph.preds(v)) for v in range(n)]
    queue = deque(v for v in range(n) if indeg[v] == 0)
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v, _ in graph.succs(u):
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return order if len(order) == n else None


def has_cycle(graph) -> bool:
    return topological_order(graph) is None


@dataclass
class Execution:
    arrivals: list[int]
    total: int
    vertex_times: list[int]


def simulate_execution(tpg: Stpg) -> Execution:
    """Step the TPG forward one timestep at a time.

    An agent enters its next vertex once the connecting Type-1 edge has been
    traversed (its cost in timesteps) and every Type-2 predecessor of that
    vertex was visited at an earlier timestep.
    """
    lay = tpg.layout
    graph = ReducedGraph(tpg)
    arrive = [None] * lay.n_vertices
    pos = [0] * lay.n_agents
    for s in lay.starts:
        arrive[s] = 0
    done = [lay.sizes[a] == 1 for a in range(lay.n_agents)]
    t = 0
    while not all(done):
        t += 1
        moving = []
        in_transit = False
        for a in range(lay.n_agents):
            if done[a]:
                continue
            v = lay.vid(a, pos[a])
            if t < arrive[v] + tpg.costs[a][pos[a]]:
                in_transit = True
                continue
            ok = True
            for u, w in graph.preds(v + 1):
                if u == v:
                    continue
                if arrive[u] is None or arrive[u] + w > t:
                    ok = False
                    break
            if ok:
                moving.append(a)
        if not moving and not in_transit:
            stuck = [a for a in range(lay.n_agents) if not done[a]]
            raise DeadlockDetected(f"agents {stuck} cannot advance at timestep {t}")
        for a in moving:
            pos[a] += 1
            arrive[lay.vid(a, pos[a])] = t
            if pos[a] == lay.sizes[a] - 1:
                done[a] = True
    arrivals = [arrive[g] for g in lay.goals]
    return Execution(arrivals, sum(arrivals), arrive)
