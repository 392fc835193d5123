"""Brute-force ground truth for small instances."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .allocator import Allocation
from .errors import BudgetExceededError
from .valuations import Instance, mask_to_set
from .welfare import WelfareParam, p_mean, p_mean_rows

DEFAULT_BUDGET = 20_000_000
_CHUNK = 1 << 18


@dataclass(frozen=True)
class ExactResult:
    allocation: Allocation
    welfare: float
    enumerated: int


def value_table(instance: Instance) -> np.ndarray:
    """``table[i, mask]`` is agent i's value for the goods in ``mask``."""
    size = 1 << instance.m
    sets = [mask_to_set(mask) for mask in range(size)]
    return np.array([[o.value(s) for s in sets] for o in instance.oracles], dtype=float)


def exact_optimum(
    instance: Instance,
    param: WelfareParam | float = 0.0,
    budget: int = DEFAULT_BUDGET,
) -> ExactResult:
    """Enumerate all ``n**m`` assignments and return a p-mean maximizer.

    Ties go to the first assignment in lexicographic order (good 0 most
    significant, agent 0 first).
    """
    if not isinstance(param, WelfareParam):
        param = WelfareParam(param)
    n, m = instance.n, instance.m
    total = n**m
    if total > budget:
        raise BudgetExceededError(f"{n}**{m} = {total} allocations exceeds budget {budget}")
    weights = param.weights_for(n) if param.weights is not None else None
    if n == 1:
        alloc = Allocation((frozenset(range(m)),))
        return ExactResult(alloc, alloc.welfare(instance, param), 1)

    table = value_table(instance)
    place = n ** np.arange(m - 1, -1, -1, dtype=np.int64)  # good 0 is the top digit
    bits = (1 << np.arange(m, dtype=np.int64))
    best_idx, best_val = -1, -math.inf
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (idx[:, None] // place[None, :]) % n
        vals = np.empty((idx.size, n))
        for i in range(n):
            masks = ((digits == i) * bits[None, :]).sum(axis=1)
            vals[:, i] = table[i, masks]
        welfare = p_mean_rows(vals, param.p, weights)
        k = int(np.argmax(welfare))
        if welfare[k] > best_val:
            best_val, best_idx = float(welfare[k]), int(idx[k])

    owner = [(best_idx // n ** (m - 1 - g)) % n for g in range(m)]
    alloc = Allocation(tuple(frozenset(g for g in range(m) if owner[g] == i) for i in range(n)))
    return ExactResult(alloc, alloc.welfare(instance, param), total)


def exact_ell(instance: Instance, agent: int, budget: int = DEFAULT_BUDGET) -> float:
    """Smallest value left to ``agent`` after removing at most ``2n`` goods, over ``2n``.

    By monotonicity only removals of exactly ``min(2n, m)`` goods are scanned.
    """
    n, m = instance.n, instance.m
    k = min(2 * n, m)
    if math.comb(m, k) > budget:
        raise BudgetExceededError(f"C({m}, {k}) removals exceeds budget {budget}")
    oracle = instance.oracles[agent]
    everything = frozenset(range(m))
    best = math.inf
    for removed in itertools.combinations(range(m), k):
        best = min(best, oracle.value(everything.difference(removed)))
    return best / (2 * n)


def measure_ratio(
    instance: Instance,
    param: WelfareParam | float,
    allocation: Allocation,
    budget: int = DEFAULT_BUDGET,
    optimum: ExactResult | None = None,
) -> float:
    """Optimal welfare divided by the allocation's welfare (inf if only the latter is 0)."""
    if not isinstance(param, WelfareParam):
        param = WelfareParam(param)
    if optimum is None:
        optimum = exact_optimum(instance, param, budget)
    got = allocation.welfare(instance, param)
    return welfare_ratio(optimum.welfare, got)


def welfare_ratio(opt: float, got: float) -> float:
    if got == 0:
        return 1.0 if opt == 0 else math.inf
    return opt / got
