"""Generalized-mean welfare: M_p, Nash social welfare and the egalitarian limit."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import InputError

NEG_INF = float("-inf")
# below this |p| the p-mean equals the geometric mean to double precision
_TINY_P = 1e-12


@dataclass(frozen=True)
class WelfareParam:
    """Exponent ``p`` in (-inf, 1] plus optional per-agent weights."""

    p: float
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p > 1:
            raise InputError(f"p must lie in (-inf, 1], got {self.p}")
        object.__setattr__(self, "p", p)
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if any(not math.isfinite(x) or x < 0 for x in w):
                raise InputError("weights must be finite and nonnegative")
            if not sum(w) > 0:
                raise InputError("weights must have a positive sum")
            object.__setattr__(self, "weights", w)

    def weights_for(self, n: int) -> np.ndarray:
        if self.weights is None:
            return np.ones(n)
        if len(self.weights) != n:
            raise InputError(f"expected {n} weights, got {len(self.weights)}")
        return np.array(self.weights)


def parse_p(text: str | float) -> float:
    """Parse ``p`` from a decimal literal or ``-inf``."""
    if isinstance(text, (int, float)):
        return float(text)
    t = text.strip().lower()
    if t in ("-inf", "-infinity"):
        return NEG_INF
    try:
        return float(t)
    except ValueError:
        raise InputError(f"cannot parse p from {text!r}") from None


def p_mean_rows(values: np.ndarray, p: float, weights: np.ndarray | None = None) -> np.ndarray:
    """Row-wise weighted power mean of a nonnegative 2-D array."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 2 or x.shape[1] == 0:
        raise InputError("need a nonempty 2-D array of values")
    if (x < 0).any():
        raise InputError("values must be nonnegative")
    w = np.ones(x.shape[1]) if weights is None else np.asarray(weights, dtype=float)
    active = w > 0
    x, w = x[:, active], w[active]
    if p == NEG_INF or x.shape[1] == 1:
        return x.min(axis=1)
    wsum = w.sum()
    if p == 1:
        return (x * w).sum(axis=1) / wsum
    has_zero = (x == 0).any(axis=1)
    with np.errstate(divide="ignore"):
        logx = np.log(x)
    w = w / wsum
    if abs(p) < _TINY_P:
        # |M_p - M_0| / M_0 = O(|p|) here, below double resolution of the result
        out = np.exp(np.where(has_zero[:, None], 0.0, logx) @ w)
        return np.where(has_zero, 0.0, out)
    if p < 0:
        z = p * np.where(has_zero[:, None], 0.0, logx)
        dead = has_zero
    else:
        # zero entries contribute 0 to the sum
        dead = ~(x > 0).any(axis=1)
        z = np.where(x > 0, p * logx, -np.inf)
        z[dead] = 0.0
    with np.errstate(over="ignore"):
        # small exponents: log1p/expm1 keeps the O(p) terms that logsumexp would round away
        near = np.where(np.isfinite(z), np.abs(z), 0.0).max(axis=1) <= 1.0
        small = np.log1p(np.expm1(np.where(near[:, None], z, 0.0)) @ w)
        wide = logsumexp(z, b=w, axis=1)
        out = np.exp(np.where(near, small, wide) / p)
    return np.where(dead, 0.0, out)


def p_mean(values: Sequence[float], param: WelfareParam | float) -> float:
    """Weighted generalized mean of nonnegative values.

    ``p = 0`` is the (weighted) geometric mean, ``p = -inf`` the minimum.
    For ``p <= 0`` any zero value makes the result 0.

    >>> p_mean([2, 4], 1.0)
    3.0
    >>> round(p_mean([4, 9], 0.0), 12)
    6.0
    """
    if not isinstance(param, WelfareParam):
        param = WelfareParam(param)
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or vals.size == 0:
        raise InputError("p_mean needs a nonempty list of values")
    w = param.weights_for(vals.size) if param.weights is not None else None
    return float(p_mean_rows(vals[None, :], param.p, w)[0])


def nsw(values: Sequence[float]) -> float:
    """Nash social welfare: the geometric mean, 0 if any value is 0."""
    return p_mean(values, 0.0)


def effective_p(p: float, n: int) -> float:
    """Route very negative exponents to the egalitarian case.

    At or below ``-n log2 n`` the p-mean is within a factor ``2**(1/n)`` of
    the minimum, so the allocator may maximize the minimum instead.  The
    base matters: with the natural log the factor only drops to ``e**(1/n)``.

    >>> effective_p(-2.0, 2)
    -inf
    >>> effective_p(-4.0, 3)
    -4.0
    """
    if p == NEG_INF:
        return NEG_INF
    if n >= 2 and p <= -n * math.log2(n):
        return NEG_INF
    return p
