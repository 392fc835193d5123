"""Invariant checks on a single instance, backed by the exact oracles.

Used by ``fairpmean verify``; every check yields one :class:`CheckResult`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .allocator import alg_solve
from .errors import DivergenceError
from .exact import DEFAULT_BUDGET, exact_ell, exact_optimum
from .valuations import Instance, check_axioms
from .welfare import WelfareParam


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def at_least(lhs: float, rhs: float, rtol: float) -> bool:
    """``lhs >= rhs`` up to a relative slack of ``rtol``."""
    return lhs >= rhs - rtol * abs(rhs)


def run_verification(
    instance: Instance,
    param: WelfareParam | float = 0.0,
    seeds: Iterable[int] = (0,),
    tolerance: float = 1e-9,
    samples: int = 200,
    budget: int = DEFAULT_BUDGET,
) -> list[CheckResult]:
    if not isinstance(param, WelfareParam):
        param = WelfareParam(param)
    n, m = instance.n, instance.m
    out: list[CheckResult] = []

    for i, oracle in enumerate(instance.oracles):
        found = []
        for seed in seeds:
            found = check_axioms(oracle, m, samples=samples, seed=seed)
            if found:
                break
        if found:
            v = found[0]
            b = "" if v.b is None else f", B={sorted(v.b)}"
            out.append(CheckResult(f"axioms[agent {i}]", False, f"{v.axiom}: A={sorted(v.a)}{b}; {v.detail}"))
        else:
            out.append(CheckResult(f"axioms[agent {i}]", True))

    if m < n:
        out.append(CheckResult("algorithm", True, f"vacuous: m={m} < n={n}, nothing to run"))
        return out

    try:
        alloc, trace = alg_solve(instance, param)
    except DivergenceError as exc:
        out.append(CheckResult("termination", False, str(exc)))
        return out

    out.append(CheckResult("partition", alloc.is_partition(m), f"bundles={alloc.to_lists()}"))
    out.append(
        CheckResult(
            "termination",
            trace.T <= trace.iteration_bound,
            f"T={trace.T}, bound={trace.iteration_bound}",
        )
    )

    shrink = 1.0 - 1.0 / m
    bad_schedule = []
    for a, b in zip(trace.iterations, trace.iterations[1:]):
        for i in range(n):
            expected = a.gamma[i] * shrink if i in a.unsat else a.gamma[i]
            if b.gamma[i] != expected:
                bad_schedule.append((b.t, i))
    out.append(
        CheckResult("gamma_schedule", not bad_schedule, f"violations at (t, agent) {bad_schedule[:5]}" if bad_schedule else "")
    )

    ell = [exact_ell(instance, i, budget) for i in range(n)]
    bundle_bad, gamma_bad = [], []
    for rec in trace.iterations:
        for i in range(n):
            if not at_least(rec.bundle_values[i], ell[i], tolerance):
                bundle_bad.append((rec.t, i, rec.bundle_values[i], ell[i]))
            if not at_least(rec.gamma[i], shrink * ell[i], tolerance):
                gamma_bad.append((rec.t, i, rec.gamma[i], ell[i]))
    out.append(CheckResult("bundle_floor", not bundle_bad, f"(t, agent, value, floor) {bundle_bad[:3]}" if bundle_bad else ""))
    out.append(CheckResult("gamma_floor", not gamma_bad, f"(t, agent, gamma, floor) {gamma_bad[:3]}" if gamma_bad else ""))

    opt = exact_optimum(instance, param, budget)
    top_bad = []
    for i, bundle in enumerate(opt.allocation.bundles):
        oracle = instance.oracles[i]
        top = max((oracle.value((g,)) for g in bundle), default=0.0)
        if not at_least(top + ell[i], oracle.value(bundle) / (4 * n), tolerance):
            top_bad.append(i)
    out.append(CheckResult("top_good_plus_floor", not top_bad, f"agents {top_bad}" if top_bad else ""))

    got = alloc.welfare(instance, param)
    need = shrink * opt.welfare / (8 * n)
    out.append(
        CheckResult(
            "approximation_8n",
            at_least(got, need, tolerance),
            f"welfare={got:.6g}, optimum={opt.welfare:.6g}, required={need:.6g}",
        )
    )
    return out
