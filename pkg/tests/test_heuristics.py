import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stpg.errors import UnreachableGoal
from stpg.graph import ReducedGraph
from stpg.heuristics import edge_slack, greedy_ewmvc, h_value, pairwise_delta_cost, vertex_slack
from stpg.longest_paths import longest_paths
from stpg.oracle import exact_ewmvc

from strategies import instance, partially_settled, seeds


def test_demo_slacks(demo_stpg):
    lp = longest_paths(ReducedGraph(demo_stpg))
    assert edge_slack(demo_stpg, lp.forward, 0) == -3
    lay = demo_stpg.layout
    # Sl(G^2, D^2): agent 1's step-2 vertex against its own goal
    assert vertex_slack(lp, lay.goals, lay.vid(1, 2), 1) == 0
    with pytest.raises(UnreachableGoal):
        vertex_slack(lp, lay.goals, lay.vid(0, 0), 1)


def test_demo_heuristics(demo_stpg):
    lp = longest_paths(ReducedGraph(demo_stpg))
    assert h_value(demo_stpg, lp, stronger=False) == 8
    w = pairwise_delta_cost(demo_stpg, lp)
    assert w.tolist() == [[0, 1], [1, 0]]
    assert h_value(demo_stpg, lp) == 9


def test_greedy_prefers_heavy_edges_and_breaks_ties_lexicographically():
    w = np.zeros((4, 4), dtype=int)
    w[0, 1] = w[1, 0] = 2
    w[1, 2] = w[2, 1] = 5
    w[2, 3] = w[3, 2] = 2
    assert greedy_ewmvc(w) == 5
    tie = np.ones((3, 3), dtype=int) - np.eye(3, dtype=int)
    assert greedy_ewmvc(tie) == 1
    assert greedy_ewmvc(np.zeros((0, 0), dtype=int)) == 0


def test_exact_ewmvc_small_cases():
    tri = np.full((3, 3), 2) - 2 * np.eye(3, dtype=int)
    assert exact_ewmvc(tri) == 3
    assert exact_ewmvc(np.array([[0, 3], [3, 0]])) == 3
    unit = np.ones((3, 3), dtype=int) - np.eye(3, dtype=int)
    assert exact_ewmvc(unit) == 2
    assert exact_ewmvc(unit, half=True) == 1.5


def brute_ewmvc(w):
    n = len(w)
    hi = int(w.max()) if n else 0
    best = None
    for x in itertools.product(range(hi + 1), repeat=n):
        if all(x[i] + x[j] >= w[i][j] for i in range(n) for j in range(n) if i != j):
            best = sum(x) if best is None else min(best, sum(x))
    return best or 0


@given(st.integers(1, 4), seeds)
def test_exact_ewmvc_matches_brute_force(n, seed):
    rng = np.random.default_rng(seed)
    w = rng.integers(0, 4, (n, n))
    w = np.maximum(w, w.T)
    np.fill_diagonal(w, 0)
    assert exact_ewmvc(w) == brute_ewmvc(w)


@given(st.integers(1, 8), seeds)
def test_greedy_below_exact(n, seed):
    rng = np.random.default_rng(seed)
    w = rng.integers(0, 6, (n, n)) * (rng.random((n, n)) < 0.5)
    assert greedy_ewmvc(w) <= exact_ewmvc(w)


@given(seeds)
def test_pairwise_matrix_shape(seed):
    _, _, stpg = instance(seed)
    stpg = partially_settled(stpg, random.Random(seed))
    lp = longest_paths(ReducedGraph(stpg))
    w = pairwise_delta_cost(stpg, lp)
    assert (w == w.T).all() and (np.diag(w) == 0).all() and (w >= 0).all()
    assert h_value(stpg, lp) >= h_value(stpg, lp, stronger=False)
