"""Value oracles over a ground set of goods ``0..m-1``.

Every oracle is a set function that is nonnegative, normalized, monotone and
subadditive. Algorithms only ever call :meth:`ValuationOracle.value`; the
concrete classes below are the representations the instance files support.
"""
from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

GoodSet = frozenset  # set of good indices in [0, m)


def as_goodset(goods: Iterable[int], m: int) -> frozenset[int]:
    s = goods if isinstance(goods, frozenset) else frozenset(goods)
    if s and (min(s) < 0 or max(s) >= m):
        bad = sorted(g for g in s if not 0 <= g < m)
        raise InputError(f"good indices {bad} out of range [0, {m})")
    return s


def mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(g for g in range(mask.bit_length()) if mask >> g & 1)


def set_to_mask(goods: Iterable[int]) -> int:
    mask = 0
    for g in goods:
        mask |= 1 << g
    return mask


class ValuationOracle:
    """Base class for value oracles on ``m`` goods.

    Subclasses implement :meth:`_evaluate` on an already validated frozenset.
    Instances are immutable once constructed.
    """

    kind = "abstract"

    def __init__(self, m: int):
        if m < 0:
            raise InputError(f"m must be nonnegative, got {m}")
        self.m = int(m)

    def value(self, goods: Iterable[int]) -> float:
        return self._evaluate(as_goodset(goods, self.m))

    def _evaluate(self, goods: frozenset[int]) -> float:
        raise NotImplementedError

    def singleton_values(self) -> list[float]:
        return [self.value((g,)) for g in range(self.m)]

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(m={self.m})"


def _check_vector(values: Sequence[float], m: int, what: str) -> tuple[float, ...]:
    vec = tuple(float(x) for x in values)
    if len(vec) != m:
        raise InputError(f"{what} has length {len(vec)}, expected {m}")
    if any(not math.isfinite(x) or x < 0 for x in vec):
        raise InputError(f"{what} must contain finite nonnegative reals")
    return vec


class AdditiveOracle(ValuationOracle):
    kind = "additive"

    def __init__(self, values: Sequence[float]):
        super().__init__(len(values))
        self.values = _check_vector(values, self.m, "additive values")

    def _evaluate(self, goods):
        # fsum is correctly rounded, so the result does not depend on set iteration order
        vals = self.values
        return math.fsum(vals[g] for g in goods)

    def to_dict(self):
        return {"kind": "additive", "values": list(self.values)}


class XOSOracle(ValuationOracle):
    """Maximum over a list of additive clauses."""

    kind = "xos"

    def __init__(self, clauses: Sequence[Sequence[float]]):
        if not clauses:
            raise InputError("xos oracle needs at least one clause")
        super().__init__(len(clauses[0]))
        self.clauses = tuple(_check_vector(c, self.m, "xos clause") for c in clauses)

    def _evaluate(self, goods):
        if not goods:
            return 0.0
        return max(math.fsum(c[g] for g in goods) for c in self.clauses)

    def to_dict(self):
        return {"kind": "xos", "clauses": [list(c) for c in self.clauses]}


class BudgetAdditiveOracle(ValuationOracle):
    kind = "budget_additive"

    def __init__(self, values: Sequence[float], cap: float):
        super().__init__(len(values))
        self.values = _check_vector(values, self.m, "budget-additive values")
        self.cap = float(cap)
        if not math.isfinite(self.cap) or self.cap < 0:
            raise InputError(f"cap must be finite and nonnegative, got {cap}")

    def _evaluate(self, goods):
        vals = self.values
        return min(math.fsum(vals[g] for g in goods), self.cap)

    def to_dict(self):
        return {"kind": "budget_additive", "values": list(self.values), "cap": self.cap}


class CoverageOracle(ValuationOracle):
    """Each good covers a subset of ``range(universe)``; value is the size of the union."""

    kind = "coverage"

    def __init__(self, universe: int, goods: Sequence[Iterable[int]]):
        super().__init__(len(goods))
        self.universe = int(universe)
        if self.universe < 0:
            raise InputError("coverage universe must be nonnegative")
        covers = []
        for elems in goods:
            cover = frozenset(int(e) for e in elems)
            if cover and (min(cover) < 0 or max(cover) >= self.universe):
                raise InputError(f"coverage element outside [0, {self.universe})")
            covers.append(cover)
        self.covers = tuple(covers)

    def _evaluate(self, goods):
        if not goods:
            return 0.0
        return float(len(frozenset().union(*(self.covers[g] for g in goods))))

    def to_dict(self):
        return {
            "kind": "coverage",
            "universe": self.universe,
            "goods": [sorted(c) for c in self.covers],
        }


class CountingOracle(ValuationOracle):
    """Value-transparent wrapper that counts queries. Safe to share across threads."""

    def __init__(self, inner: ValuationOracle):
        super().__init__(inner.m)
        self.inner = inner
        self.kind = inner.kind
        self._count = 0
        self._lock = threading.Lock()

    @property
    def count(self) -> int:
        return self._count

    def reset(self) -> None:
        with self._lock:
            self._count = 0

    def value(self, goods):
        v = self.inner.value(goods)
        with self._lock:
            self._count += 1
        return v

    def to_dict(self):
        return self.inner.to_dict()


@dataclass(frozen=True)
class Instance:
    """``n`` agents, ``m`` goods and one oracle per agent."""

    n: int
    m: int
    oracles: tuple[ValuationOracle, ...]

    def __post_init__(self):
        object.__setattr__(self, "oracles", tuple(self.oracles))
        if self.n < 1:
            raise InputError(f"need at least one agent, got n={self.n}")
        if len(self.oracles) != self.n:
            raise InputError(f"expected {self.n} oracles, got {len(self.oracles)}")
        for i, o in enumerate(self.oracles):
            if o.m != self.m:
                raise InputError(f"oracle {i} is defined on {o.m} goods, expected {self.m}")

    @classmethod
    def from_oracles(cls, oracles: Sequence[ValuationOracle]) -> "Instance":
        if not oracles:
            raise InputError("need at least one oracle")
        return cls(len(oracles), oracles[0].m, tuple(oracles))

    def value(self, agent: int, goods: Iterable[int]) -> float:
        return self.oracles[agent].value(goods)

    def counting(self) -> "Instance":
        """Copy whose oracles are fresh :class:`CountingOracle` wrappers."""
        return Instance(self.n, self.m, tuple(CountingOracle(o) for o in self.oracles))

    def query_count(self) -> int:
        return sum(o.count for o in self.oracles if isinstance(o, CountingOracle))


# --------------------------------------------------------------------------- axioms


@dataclass(frozen=True)
class Violation:
    axiom: str  # nonnegative | normalized | monotone | subadditive
    a: frozenset[int]
    b: frozenset[int] | None
    detail: str


def _exceeds(lhs: float, rhs: float, rtol: float) -> bool:
    return lhs > rhs + rtol * max(abs(lhs), abs(rhs))


def check_axioms(
    oracle: ValuationOracle,
    m: int,
    samples: int = 200,
    seed: int = 0,
    *,
    exhaustive_limit: int = 12,
    rtol: float = 1e-12,
    max_witnesses: int = 5,
) -> list[Violation]:
    """Look for violations of the four valuation axioms.

    For ``m <= exhaustive_limit`` every subset and every pair of subsets is
    checked; above that ``samples`` random pairs are drawn. An empty list
    means nothing was found.
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    if m <= exhaustive_limit:
        return _check_exhaustive(oracle, m, rtol, max_witnesses)
    return _check_sampled(oracle, m, samples, seed, rtol, max_witnesses)


def _check_exhaustive(oracle, m, rtol, max_witnesses):
    size = 1 << m
    vals = np.array([oracle.value(mask_to_set(mask)) for mask in range(size)], dtype=float)
    found: dict[str, list[Violation]] = {}

    def add(v: Violation) -> bool:
        bucket = found.setdefault(v.axiom, [])
        if len(bucket) < max_witnesses:
            bucket.append(v)
        return len(bucket) >= max_witnesses

    if vals[0] != 0:
        add(Violation("normalized", frozenset(), None, f"v(empty) = {vals[0]!r}"))
    for mask in np.flatnonzero(vals < 0):
        if add(Violation("nonnegative", mask_to_set(int(mask)), None, f"v = {vals[mask]!r}")):
            break
    done = False
    for g in range(m):
        bit = 1 << g
        for mask in range(size):
            if mask & bit:
                continue
            lo, hi = vals[mask], vals[mask | bit]
            if _exceeds(lo, hi, rtol):
                done = add(
                    Violation(
                        "monotone",
                        mask_to_set(mask),
                        mask_to_set(mask | bit),
                        f"v(A) = {lo!r} > v(B) = {hi!r} with A subset of B",
                    )
                )
                if done:
                    break
        if done:
            break
    others = np.arange(size)
    for a in range(size):
        lhs = vals[a | others]
        rhs = vals[a] + vals
        bad = np.flatnonzero(lhs > rhs + rtol * np.maximum(np.abs(lhs), np.abs(rhs)))
        for b in bad:
            b = int(b)
            if add(
                Violation(
                    "subadditive",
                    mask_to_set(a),
                    mask_to_set(b),
                    f"v(A|B) = {vals[a | b]!r} > v(A) + v(B) = {vals[a] + vals[b]!r}",
                )
            ):
                break
        if len(found.get("subadditive", ())) >= max_witnesses:
            break
    return [v for axiom in ("normalized", "nonnegative", "monotone", "subadditive") for v in found.get(axiom, [])]


def _check_sampled(oracle, m, samples, seed, rtol, max_witnesses):
    rng = random.Random(seed)
    out: list[Violation] = []
    counts: dict[str, int] = {}

    def add(v: Violation):
        if counts.get(v.axiom, 0) < max_witnesses:
            counts[v.axiom] = counts.get(v.axiom, 0) + 1
            out.append(v)

    def draw() -> frozenset[int]:
        density = rng.random()
        return frozenset(g for g in range(m) if rng.random() < density)

    empty = oracle.value(frozenset())
    if empty != 0:
        add(Violation("normalized", frozenset(), None, f"v(empty) = {empty!r}"))
    for _ in range(samples):
        a, b = draw(), draw()
        va, vb, vu, vi = (oracle.value(s) for s in (a, b, a | b, a & b))
        for s, v in ((a, va), (b, vb)):
            if v < 0:
                add(Violation("nonnegative", s, None, f"v = {v!r}"))
        for small, vs, big, vbig in ((a, va, a | b, vu), (b, vb, a | b, vu), (a & b, vi, a, va)):
            if _exceeds(vs, vbig, rtol):
                add(Violation("monotone", small, big, f"v(A) = {vs!r} > v(B) = {vbig!r} with A subset of B"))
        if _exceeds(vu, va + vb, rtol):
            add(Violation("subadditive", a, b, f"v(A|B) = {vu!r} > v(A) + v(B) = {va + vb!r}"))
    return out
