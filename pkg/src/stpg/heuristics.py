"""Slacks, pairwise future-cost bounds and the h-value of a search node."""
from __future__ import annotations

import numpy as np

from .errors import UnreachableGoal
from .graph import TYPE2_COST, EdgeState, Stpg
from .longest_paths import UNREACHABLE, LongestPathState


def edge_slack(stpg: Stpg, forward, k: int) -> int:
    """Slack of switchable pair ``k`` in its fixed direction; negative means it conflicts."""
    lay = stpg.layout
    return forward[lay.fix_dst[k]] - forward[lay.fix_src[k]] - TYPE2_COST


def reversed_edge_slack(stpg: Stpg, forward, k: int) -> int:
    lay = stpg.layout
    return forward[lay.rev_dst[k]] - forward[lay.rev_src[k]] - TYPE2_COST


def vertex_slack(state: LongestPathState, goals, v: int, goal_agent: int) -> int:
    """How far ``L(v)`` can grow before the goal of ``goal_agent`` is pushed back."""
    back = int(state.backward[v, goal_agent])
    if back == UNREACHABLE:
        raise UnreachableGoal(f"vertex {v} has no path to the goal of agent {goal_agent}")
    return state.forward[goals[goal_agent]] - state.forward[v] - back


def _goal_increase(state: LongestPathState, goal_len: np.ndarray, v: int, slack: int) -> np.ndarray:
    # lower bound on each goal's delay if L(v) grows by -slack; -inf-like where unreachable
    back = state.backward[v]
    vs = goal_len - state.forward[v] - back
    return np.where(back != UNREACHABLE, -slack - vs, np.iinfo(np.int64).min // 4)


def pairwise_delta_cost(stpg: Stpg, state: LongestPathState) -> np.ndarray:
    """Symmetric matrix of lower bounds on the joint increase of two agents' goal times."""
    lay = stpg.layout
    n = lay.n_agents
    weights = np.zeros((n, n), dtype=np.int64)
    forward = state.forward
    goal_len = np.array([forward[g] for g in lay.goals], dtype=np.int64)
    for k, st in enumerate(stpg.states):
        if st != EdgeState.SWITCHABLE:
            continue
        s_fix = edge_slack(stpg, forward, k)
        if s_fix >= 0:
            continue
        s_rev = reversed_edge_slack(stpg, forward, k)
        if s_rev >= 0:
            continue
        fix_gain = _goal_increase(state, goal_len, lay.fix_dst[k], s_fix)
        rev_gain = _goal_increase(state, goal_len, lay.rev_dst[k], s_rev)
        np.maximum(weights, np.minimum.outer(fix_gain, rev_gain), out=weights)
    np.fill_diagonal(weights, 0)
    weights = np.maximum(weights, weights.T)
    return np.maximum(weights, 0)


def greedy_ewmvc(weights) -> int:
    """Greedy maximum-weight matching; its total lower-bounds any vertex cover of the weights."""
    w = np.asarray(weights, dtype=np.int64)
    n = w.shape[0]
    # argmax scans row-major, so ties go to the lexicographically smallest pair
    w = np.triu(np.maximum(w, w.T), 1)
    total = 0
    while n:
        idx = int(np.argmax(w))
        best = int(w.flat[idx])
        if best <= 0:
            break
        i, j = divmod(idx, n)
        total += best
        w[[i, j], :] = 0
        w[:, [i, j]] = 0
    return total


def h_value(stpg: Stpg, state: LongestPathState, stronger: bool = True) -> int:
    base = state.goal_sum(stpg.layout.goals)
    if not stronger:
        return base
    return base + greedy_ewmvc(pairwise_delta_cost(stpg, state))
