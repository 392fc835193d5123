"""Seeded instance families: random instances, the XOS hard family and the
Partition-reduction family."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import InputError
from .valuations import (
    AdditiveOracle,
    BudgetAdditiveOracle,
    CoverageOracle,
    Instance,
    ValuationOracle,
    XOSOracle,
)

KINDS = ("additive", "xos", "budget_additive", "coverage")


def _values(rng: np.random.Generator, m: int, zero_prob: float) -> list[float]:
    vals = np.round(rng.uniform(0.0, 10.0, size=m), 6)
    if zero_prob > 0:
        vals[rng.random(m) < zero_prob] = 0.0
    return [float(x) for x in vals]


def gen_random(
    kind: str,
    n: int,
    m: int,
    seed: int,
    *,
    clauses: int = 3,
    cap_fraction: float = 0.6,
    universe: int | None = None,
    cover_size: int = 3,
    zero_prob: float = 0.0,
) -> Instance:
    """Random instance of one oracle kind; identical for identical arguments.

    Additive values are uniform on [0, 10] (rounded to 6 decimals), xos uses
    ``clauses`` such vectors, budget-additive caps at ``cap_fraction`` of the
    total, and coverage draws up to ``cover_size`` elements per good from a
    universe of ``universe`` (default ``2m``) elements.
    """
    if n < 1 or m < 0:
        raise InputError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    if not 0 <= zero_prob < 1:
        raise InputError("zero_prob must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    oracles: list[ValuationOracle] = []
    for _ in range(n):
        if kind == "additive":
            oracles.append(AdditiveOracle(_values(rng, m, zero_prob)))
        elif kind == "xos":
            if clauses < 1:
                raise InputError("clauses must be >= 1")
            oracles.append(XOSOracle([_values(rng, m, zero_prob) for _ in range(clauses)]))
        elif kind == "budget_additive":
            if not 0 < cap_fraction <= 1:
                raise InputError("cap_fraction must lie in (0, 1]")
            vals = _values(rng, m, zero_prob)
            oracles.append(BudgetAdditiveOracle(vals, round(cap_fraction * math.fsum(vals), 6)))
        elif kind == "coverage":
            u = universe if universe is not None else max(2 * m, 1)
            if u < 1 or cover_size < 0:
                raise InputError("coverage needs universe >= 1 and cover_size >= 0")
            goods = []
            for _ in range(m):
                k = int(rng.integers(0, min(cover_size, u) + 1))
                if zero_prob and rng.random() < zero_prob:
                    k = 0
                goods.append(sorted(int(e) for e in rng.choice(u, size=k, replace=False)))
            oracles.append(CoverageOracle(u, goods))
        else:
            raise InputError(f"unknown oracle kind {kind!r}; expected one of {KINDS}")
    return Instance(n, m, tuple(oracles))


# ------------------------------------------------------------ XOS hard family


class XosHardOracle(ValuationOracle):
    """Closed form of the hard XOS valuations on ``m = n**2`` goods.

    ``f(T) = max(min(|T|, k), abar * |T|)`` with ``k = floor((1 + delta) n**(4 delta))``
    and ``abar = (1 + delta) / n**(1 - 2 delta)``. With a ``block`` the value
    is ``max(f(T), |T & block|)``.
    """

    kind = "xos_hard"

    def __init__(self, n: int, delta: float, block: frozenset[int] | None = None):
        if n < 2:
            raise InputError("xos_hard needs n >= 2")
        if not 0 < delta < 0.25:
            raise InputError(f"delta must lie in (0, 1/4), got {delta}")
        super().__init__(n * n)
        self.n = n
        self.delta = float(delta)
        self.cap = math.floor((1 + delta) * n ** (4 * delta))
        self.abar = (1 + delta) / n ** (1 - 2 * delta)
        self.block = None if block is None else frozenset(block)

    def f(self, size: int) -> float:
        return max(float(min(size, self.cap)), self.abar * size)

    def _evaluate(self, goods):
        val = self.f(len(goods))
        if self.block is not None:
            val = max(val, float(len(goods & self.block)))
        return val

    def to_dict(self):
        raise InputError("xos_hard oracles serialize at instance level")


def random_blocks(n: int, seed: int) -> list[frozenset[int]]:
    """Uniformly random partition of ``range(n*n)`` into ``n`` blocks of size ``n``."""
    perm = np.random.default_rng(seed).permutation(n * n)
    return [frozenset(int(g) for g in perm[i * n : (i + 1) * n]) for i in range(n)]


class XosHardInstance(Instance):
    """Instance that remembers the parameters it was generated from."""

    def __init__(self, n: int, delta: float, seed: int, identical: bool):
        if identical:
            oracles = tuple(XosHardOracle(n, delta) for _ in range(n))
            blocks = None
        else:
            blocks = random_blocks(n, seed)
            oracles = tuple(XosHardOracle(n, delta, b) for b in blocks)
        super().__init__(n, n * n, oracles)
        object.__setattr__(self, "delta", float(delta))
        object.__setattr__(self, "seed", int(seed))
        object.__setattr__(self, "identical", bool(identical))
        object.__setattr__(self, "blocks", blocks)

    def __reduce__(self):
        return (XosHardInstance, (self.n, self.delta, self.seed, self.identical))


def gen_xos_hard(n: int, delta: float = 0.1, seed: int = 0, identical: bool = False) -> XosHardInstance:
    """Hard XOS family: every agent gets ``f`` (identical) or ``max(f, |T & T_i|)``."""
    if not 0 < delta < 0.25:
        raise InputError(f"delta must lie in (0, 1/4), got {delta}")
    return XosHardInstance(n, delta, seed, identical)


# ------------------------------------------------------------ Partition family


class PartitionInstance(Instance):
    def __init__(self, s: Sequence[int]):
        sizes = tuple(int(x) for x in s)
        if len(sizes) < 2:
            raise InputError("partition family needs at least two numbers")
        if any(x <= 0 for x in sizes):
            raise InputError("partition numbers must be positive integers")
        k = len(sizes)
        oracles = [AdditiveOracle(sizes), AdditiveOracle(sizes)]
        oracles += [AdditiveOracle([0.0] * k) for _ in range(k - 2)]
        super().__init__(k, k, tuple(oracles))
        object.__setattr__(self, "sizes", sizes)

    def target_welfare(self, p: float) -> float:
        return partition_target(self.sizes, p)

    def __reduce__(self):
        return (PartitionInstance, (self.sizes,))


def gen_partition_reduction(s: Sequence[int]) -> PartitionInstance:
    """``k`` agents and goods; agents 0 and 1 value good j at ``s[j]``, the rest value nothing."""
    if not s:
        raise InputError("empty partition instance")
    return PartitionInstance(s)


def partition_target(s: Sequence[int], p: float) -> float:
    """p-mean welfare ``(2/k)**(1/p) * z/2`` reached exactly when ``s`` splits evenly."""
    if not 0 < p < 1:
        raise InputError("partition target is defined for 0 < p < 1")
    return (2 / len(s)) ** (1 / p) * sum(s) / 2
