"""Approximation algorithms for p-mean welfare under subadditive valuations.

The main entry point is :func:`alg_solve`. Each outer iteration matches one
good per agent, hands out high-value singletons, splits the rest with a
moving knife, and then scales down the per-agent estimate ``gamma`` of every
agent whose bundle fell short of it. :func:`matching_baseline` is the
``(m - n + 1)``-approximation for ``p <= 0`` and :func:`combined_solve` picks
between the two by instance shape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DivergenceError, InfeasibleError, InputError
from .matching import BIG, MatchingResult, bottleneck_matching, max_weight_matching, min_weight_matching
from .valuations import Instance, ValuationOracle
from .welfare import NEG_INF, WelfareParam, effective_p, p_mean


@dataclass(frozen=True)
class Allocation:
    bundles: tuple[frozenset[int], ...]

    @classmethod
    def from_lists(cls, bundles: Iterable[Iterable[int]]) -> "Allocation":
        return cls(tuple(frozenset(b) for b in bundles))

    @property
    def n(self) -> int:
        return len(self.bundles)

    def values(self, instance: Instance) -> list[float]:
        return [instance.value(i, b) for i, b in enumerate(self.bundles)]

    def welfare(self, instance: Instance, param: WelfareParam) -> float:
        return p_mean(self.values(instance), param)

    def is_partition(self, m: int) -> bool:
        seen: set[int] = set()
        for b in self.bundles:
            if seen & b:
                return False
            seen |= b
        return seen == set(range(m))

    def to_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.bundles]


@dataclass
class GammaState:
    t: int
    gamma: list[float]
    sat: frozenset[int]
    unsat: frozenset[int]


@dataclass(frozen=True)
class IterationRecord:
    t: int
    gamma: tuple[float, ...]  # estimates used during this iteration
    matching: tuple[int, ...]
    matching_used_sentinel: bool
    singletons: Mapping[int, int]
    knife: Mapping[int, frozenset[int]]
    bundles: tuple[frozenset[int], ...]  # B_i^t, matched good excluded
    bundle_values: tuple[float, ...]
    sat: frozenset[int]
    unsat: frozenset[int]


@dataclass
class RunTrace:
    iterations: list[IterationRecord] = field(default_factory=list)
    effective_p: float = 0.0
    iteration_bound: int = 0
    queries: int = 0

    @property
    def T(self) -> int:
        return len(self.iterations)


# ----------------------------------------------------------------- subroutines


def moving_knife(
    goods: Iterable[int],
    agents: Iterable[int],
    oracles: Sequence[ValuationOracle],
    n: int,
    order: Sequence[int] | None = None,
) -> dict[int, frozenset[int]]:
    """Scan goods in ``order`` and cut a bundle as soon as some remaining agent
    values the current prefix at ``1/(2n)`` of its value for all of ``goods``.

    Goods left over once the scan stops go to the last agent that was cut a
    bundle (the lowest-index agent if nobody was). Agents never reached get
    an empty bundle.
    """
    G = frozenset(goods)
    remaining = sorted(set(agents))
    bundles = {a: frozenset() for a in remaining}
    if not remaining or not G:
        return bundles
    if order is None:
        order = sorted(G)
    elif set(order) != G or len(order) != len(G):
        raise InputError("order must list every good of G exactly once")
    threshold = {a: oracles[a].value(G) / (2 * n) for a in remaining}
    S: list[int] = []
    last = None
    pos = 0
    while pos < len(order) and remaining:
        S.append(order[pos])
        pos += 1
        s = frozenset(S)
        for a in remaining:
            if oracles[a].value(s) >= threshold[a]:
                bundles[a] = s
                remaining.remove(a)
                last = a
                S = []
                break
    leftover = frozenset(order[pos:]) | frozenset(S)
    if leftover:
        target = last if last is not None else min(bundles)
        bundles[target] = bundles[target] | leftover
    return bundles


def singleton_phase(
    goods: Iterable[int],
    agents: Iterable[int],
    oracles: Sequence[ValuationOracle],
    n: int,
    singletons: Sequence[Sequence[float]] | None = None,
) -> tuple[dict[int, int], frozenset[int], tuple[int, ...]]:
    """Repeatedly give a single good to an agent valuing it at ``>= 1/(2n)`` of
    the current pool, scanning pairs in (agent, good) order.

    ``singletons[i][g]`` may be passed to reuse already queried single-good values.
    Returns ``(assignments, remaining goods, remaining agents)``.
    """
    G = set(goods)
    A = sorted(set(agents))
    assigned: dict[int, int] = {}

    def single(a: int, g: int) -> float:
        if singletons is not None:
            return singletons[a][g]
        return oracles[a].value((g,))

    while G and A:
        hit = None
        for a in A:
            bar = oracles[a].value(frozenset(G)) / (2 * n)
            for g in sorted(G):
                if single(a, g) >= bar:
                    hit = (a, g)
                    break
            if hit:
                break
        if hit is None:
            break
        a, g = hit
        assigned[a] = g
        G.discard(g)
        A.remove(a)
    return assigned, frozenset(G), tuple(A)


def gamma_init(instance: Instance, singletons: Sequence[Sequence[float]] | None = None) -> GammaState:
    """Initial estimates: 0 if the agent's value vanishes once its ``2n`` best
    single goods are removed, else its value for everything."""
    n, m = instance.n, instance.m
    if singletons is None:
        singletons = [o.singleton_values() for o in instance.oracles]
    everything = frozenset(range(m))
    gamma = []
    for i, o in enumerate(instance.oracles):
        ranked = sorted(range(m), key=lambda g: (-singletons[i][g], g))
        rest = frozenset(ranked[2 * n :])
        gamma.append(0.0 if o.value(rest) == 0 else o.value(everything))
    return GammaState(0, gamma, frozenset(), frozenset(range(n)))


def alg_iteration_bound(instance: Instance, singletons: Sequence[Sequence[float]] | None = None) -> int:
    """Explicit outer-loop iteration bound ``ceil(sum_i m ln(2 n m V_i)) + n + 1``.

    ``V_i`` is the ratio of agent i's largest to smallest positive single-good
    value; agents with no positive single-good value contribute nothing.
    """
    n, m = instance.n, instance.m
    if singletons is None:
        singletons = [o.singleton_values() for o in instance.oracles]
    total = 0.0
    for row in singletons:
        positive = [x for x in row if x > 0]
        if not positive:
            continue
        ratio = max(positive) / min(positive)
        total += m * math.log(2 * n * m * ratio)
    return math.ceil(total) + n + 1


# ----------------------------------------------------------------- matching step


def _edge_weights(singletons: np.ndarray, gamma: np.ndarray, p: float, eta: np.ndarray | None):
    """Weight matrix and solver for the matching step at exponent ``p``."""
    base = singletons + gamma[:, None]
    if p == NEG_INF:
        return base, bottleneck_matching
    scale = np.ones(len(gamma)) if eta is None else eta
    if p == 0:
        with np.errstate(divide="ignore"):
            w = scale[:, None] * np.log(base)
        w = np.where((base == 0) & (scale[:, None] > 0), -BIG, np.where(base == 0, 0.0, w))
        return w, max_weight_matching
    if p > 0:
        return scale[:, None] * base**p, max_weight_matching
    with np.errstate(divide="ignore"):
        powered = base**p
    w = np.where((base == 0) & (scale[:, None] > 0), BIG, np.where(base == 0, 0.0, scale[:, None] * powered))
    return w, min_weight_matching


def alg_solve(
    instance: Instance,
    param: WelfareParam | float = 0.0,
    iteration_cap_factor: float = 2.0,
) -> tuple[Allocation, RunTrace]:
    """Compute an allocation whose p-mean welfare is within ``8n`` of optimal.

    Requires ``m >= n``. Raises :class:`DivergenceError` if the loop exceeds
    ``iteration_cap_factor`` times :func:`alg_iteration_bound`, which can only
    happen for oracles that break the valuation axioms.
    """
    if not isinstance(param, WelfareParam):
        param = WelfareParam(param)
    n, m = instance.n, instance.m
    if m < n:
        raise InfeasibleError(f"need at least as many goods as agents (m={m}, n={n})")
    inst = instance.counting()
    oracles = inst.oracles
    eta = None if param.weights is None else param.weights_for(n)
    p = effective_p(param.p, n)

    singletons = np.array([o.singleton_values() for o in oracles], dtype=float).reshape(n, m)
    bound = alg_iteration_bound(inst, singletons)
    cap = math.ceil(bound * iteration_cap_factor)
    state = gamma_init(inst, singletons)
    trace = RunTrace(effective_p=p, iteration_bound=bound)
    everything = range(m)
    shrink = 1.0 - 1.0 / m

    while state.unsat:
        if state.t >= cap:
            raise DivergenceError(
                f"no convergence after {state.t} iterations (cap {cap}); check the valuation axioms"
            )
        gamma = np.array(state.gamma)
        weights, solver = _edge_weights(singletons, gamma, p, eta)
        match: MatchingResult = solver(weights)
        matched = set(match.assignment)
        pool = frozenset(g for g in everything if g not in matched)

        singles, pool, rest = singleton_phase(pool, range(n), oracles, n, singletons)
        knife = moving_knife(pool, rest, oracles, n)
        bundles = [frozenset() for _ in range(n)]
        for a, g in singles.items():
            bundles[a] = frozenset((g,))
        for a, b in knife.items():
            bundles[a] = b
        if pool and not rest:
            # every agent took a singleton; leftovers join the last one served
            last = list(singles)[-1]
            bundles[last] = bundles[last] | pool

        values = tuple(oracles[i].value(bundles[i]) for i in range(n))
        sat = frozenset(i for i in range(n) if values[i] >= state.gamma[i])
        unsat = frozenset(range(n)) - sat
        trace.iterations.append(
            IterationRecord(
                t=state.t,
                gamma=tuple(state.gamma),
                matching=match.assignment,
                matching_used_sentinel=match.uses_sentinel,
                singletons=dict(singles),
                knife=dict(knife),
                bundles=tuple(bundles),
                bundle_values=values,
                sat=sat,
                unsat=unsat,
            )
        )
        new_gamma = [g * shrink if i in unsat else g for i, g in enumerate(state.gamma)]
        state = GammaState(state.t + 1, new_gamma, sat, unsat)

    last = trace.iterations[-1]
    final = Allocation(tuple(last.bundles[i] | {last.matching[i]} for i in range(n)))
    trace.queries = inst.query_count()
    return final, trace


# ----------------------------------------------------------------- baselines


def matching_baseline(instance: Instance, param: WelfareParam | float = 0.0) -> Allocation:
    """Optimal single-good matching, leftovers to agent 0. For ``p <= 0`` this
    is within a factor ``m - n + 1`` of the optimal p-mean welfare."""
    if not isinstance(param, WelfareParam):
        param = WelfareParam(param)
    n, m = instance.n, instance.m
    if m < n:
        raise InfeasibleError(f"need at least as many goods as agents (m={m}, n={n})")
    if param.p > 0:
        raise InputError(f"matching baseline needs p <= 0, got {param.p}")
    singletons = np.array([o.singleton_values() for o in instance.oracles], dtype=float).reshape(n, m)
    eta = None if param.weights is None else param.weights_for(n)
    weights, solver = _edge_weights(singletons, np.zeros(n), param.p, eta)
    match = solver(weights)
    bundles = [{g} for g in match.assignment]
    matched = set(match.assignment)
    bundles[0] |= {g for g in range(m) if g not in matched}
    return Allocation(tuple(frozenset(b) for b in bundles))


def combined_solve(instance: Instance, param: WelfareParam | float = 0.0) -> Allocation:
    """``O(sqrt m)``-approximation for Nash welfare: the main algorithm when
    ``m >= n**2``, otherwise the matching baseline."""
    if not isinstance(param, WelfareParam):
        param = WelfareParam(param)
    if param.p != 0:
        raise InputError("combined strategy is defined for Nash welfare (p = 0) only")
    if instance.m >= instance.n**2:
        return alg_solve(instance, param)[0]
    return matching_baseline(instance, param)
