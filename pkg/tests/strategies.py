"""Shared random generators for property tests."""
import random

from hypothesis import strategies as st

from stpg.graph import DiGraph, Direction, ReducedGraph, has_cycle, settle
from stpg.oracle import small_instances


def instance(seed, max_switchable=10):
    return next(small_instances(1, seed, max_switchable))


seeds = st.integers(0, 2**31 - 1)


def partially_settled(stpg, rng: random.Random):
    """Settle a random subset of the switchable pairs, keeping the reduced view acyclic."""
    for k in stpg.switchable():
        if rng.random() < 0.5:
            continue
        child = settle(stpg, [k], rng.choice((Direction.FIX, Direction.REVERSE)))
        if not has_cycle(ReducedGraph(child)):
            stpg = child
    return stpg


def random_dag(rng: random.Random, n: int, p: float, max_w: int = 3):
    """DAG on ``n`` vertices consistent with a random hidden order; returns the graph and that order."""
    order = list(range(n))
    rng.shuffle(order)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((order[i], order[j], rng.randint(1, max_w)))
    goals = rng.sample(range(n), max(1, n // 4))
    return DiGraph(n, edges, goals), order
