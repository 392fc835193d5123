"""Left-perfect matchings in the complete agent x good bipartite graph.

Rows are agents, columns are goods, ``n <= m``. Entries at or beyond the
``BIG`` sentinel mark edges to avoid: ``-BIG`` under maximization, ``+BIG``
under minimization. A sentinel edge is used only when every left-perfect
matching needs one, and the result is flagged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import InfeasibleError, InputError

BIG = 1e300


@dataclass(frozen=True)
class MatchingResult:
    assignment: tuple[int, ...]  # assignment[i] is the good matched to agent i
    objective: float
    uses_sentinel: bool = False


def _as_matrix(weights) -> np.ndarray:
    w = np.array(weights, dtype=float)
    if w.ndim == 1 and w.size == 0:
        w = w.reshape(0, 0)
    if w.ndim != 2:
        raise InputError(f"weight matrix must be 2-D, got shape {w.shape}")
    if np.isnan(w).any():
        raise InputError("weight matrix contains NaN")
    n, m = w.shape
    if n > m:
        raise InfeasibleError(f"no left-perfect matching: {n} agents but only {m} goods")
    return w


def _min_cost(cost: np.ndarray, sentinel: np.ndarray) -> tuple[np.ndarray, bool]:
    """Minimize total cost, treating ``sentinel`` cells as last-resort edges.

    Sentinel cells get a finite penalty larger than any achievable spread of the
    finite part, so the solver first minimizes how many sentinels it uses.
    """
    n = cost.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int), False
    if sentinel.any():
        finite = cost[~sentinel]
        spread = float(finite.max() - finite.min()) if finite.size else 0.0
        base = float(finite.min()) if finite.size else 0.0
        penalty = (n + 1) * (spread + 1.0)
        cost = np.where(sentinel, base + penalty, cost)
    rows, cols = linear_sum_assignment(cost)
    assign = np.empty(n, dtype=int)
    assign[rows] = cols
    used = bool(sentinel[np.arange(n), assign].any())
    return assign, used


def _total(w: np.ndarray, assign: np.ndarray) -> float:
    total = 0.0
    for i, g in enumerate(assign):
        total += w[i, g]
    return float(total)


def max_weight_matching(weights) -> MatchingResult:
    """Left-perfect matching maximizing the sum of matched weights."""
    w = _as_matrix(weights)
    sentinel = w <= -BIG
    assign, used = _min_cost(np.where(sentinel, 0.0, -w), sentinel)
    return MatchingResult(tuple(int(g) for g in assign), _total(w, assign), used)


def min_weight_matching(weights) -> MatchingResult:
    """Left-perfect matching minimizing the sum of matched weights."""
    w = _as_matrix(weights)
    sentinel = w >= BIG
    assign, used = _min_cost(np.where(sentinel, 0.0, w), sentinel)
    return MatchingResult(tuple(int(g) for g in assign), _total(w, assign), used)


def _threshold_matching(w: np.ndarray, threshold: float) -> np.ndarray | None:
    graph = csr_matrix((w >= threshold).astype(np.int8))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if (match < 0).any():
        return None
    return match


def bottleneck_matching(weights) -> MatchingResult:
    """Left-perfect matching maximizing the smallest matched weight.

    Binary search over the sorted distinct weights; each probe is a
    Hopcroft-Karp maximum matching on the edges at or above the threshold.
    """
    w = _as_matrix(weights)
    n = w.shape[0]
    if n == 0:
        return MatchingResult((), float("inf"))
    levels = np.unique(w)
    lo, hi = 0, len(levels) - 1
    best = _threshold_matching(w, levels[lo])  # the full graph always has one
    while lo < hi:
        mid = (lo + hi + 1) // 2
        match = _threshold_matching(w, levels[mid])
        if match is None:
            hi = mid - 1
        else:
            lo, best = mid, match
    objective = float(min(w[i, best[i]] for i in range(n)))
    used = bool((w[np.arange(n), best] <= -BIG).any())
    return MatchingResult(tuple(int(g) for g in best), objective, used)
