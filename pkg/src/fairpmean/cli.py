"""``fairpmean`` command line: solve, verify, generate, benchmark.

Exit codes: 0 success, 2 malformed input, 3 infeasible (m < n),
4 exact-solver budget exceeded, 1 anything else.
"""
from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .allocator import alg_solve, combined_solve, matching_baseline
from .benchmark import BenchmarkConfig, rows_to_csv, run_benchmark
from .errors import BudgetExceededError, FairPMeanError, InfeasibleError, InputError
from .exact import DEFAULT_BUDGET, exact_optimum
from .generators import gen_partition_reduction, gen_random, gen_xos_hard
from .serialization import dumps_instance, load_instance
from .verify import run_verification
from .welfare import NEG_INF, WelfareParam, parse_p

EXIT_INPUT, EXIT_INFEASIBLE, EXIT_BUDGET = 2, 3, 4


def _fail(exc: Exception) -> None:
    code = 1
    if isinstance(exc, InputError):
        code = EXIT_INPUT
    elif isinstance(exc, InfeasibleError):
        code = EXIT_INFEASIBLE
    elif isinstance(exc, BudgetExceededError):
        code = EXIT_BUDGET
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _param(p: str, eta_path: str | None) -> WelfareParam:
    weights = None
    if eta_path:
        try:
            weights = json.loads(Path(eta_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read weights {eta_path}: {exc}") from None
        if not isinstance(weights, list):
            raise InputError("weights file must hold a JSON array")
    return WelfareParam(parse_p(p), None if weights is None else tuple(weights))


def _json_float(x: float):
    if x == NEG_INF:
        return "-inf"
    if x == float("inf"):
        return "inf"
    return x


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        click.echo(text, nl=False)


@click.group()
def main():
    """Approximate p-mean welfare allocations under subadditive valuations."""


@main.command()
@click.argument("instance_path", type=click.Path(dir_okay=False))
@click.option("--p", "p", default="0", show_default=True, help="Exponent: decimal or -inf.")
@click.option(
    "--algorithm",
    type=click.Choice(["alg", "matching", "combined", "exact"]),
    default="alg",
    show_default=True,
)
@click.option("--eta", "eta_path", type=click.Path(dir_okay=False), help="JSON array of agent weights.")
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True, help="Exact-solver enumeration budget.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write the report here.")
def solve(instance_path, p, algorithm, eta_path, budget, out_path):
    """Solve one instance and print a JSON report."""
    try:
        param = _param(p, eta_path)
        instance = load_instance(instance_path)
        param.weights_for(instance.n)
        counted = instance.counting()
        iterations = None
        start = time.perf_counter()
        if algorithm == "alg":
            alloc, trace = alg_solve(counted, param)
            iterations = trace.T
        elif algorithm == "matching":
            alloc = matching_baseline(counted, param)
        elif algorithm == "combined":
            alloc = combined_solve(counted, param)
        else:
            alloc = exact_optimum(counted, param, budget).allocation
        elapsed = (time.perf_counter() - start) * 1000
        values = alloc.values(instance)
        report = {
            "algorithm": algorithm,
            "p": _json_float(param.p),
            "allocation": alloc.to_lists(),
            "values": values,
            "welfare": alloc.welfare(instance, param),
            "iterations": iterations,
            "queries": counted.query_count(),
            "wall_ms": round(elapsed, 3),
        }
    except FairPMeanError as exc:
        _fail(exc)
    _emit(json.dumps(report, indent=2) + "\n", out_path)


@main.command()
@click.argument("instance_path", type=click.Path(dir_okay=False))
@click.option("--p", "p", default="0", show_default=True)
@click.option("--seeds", default="0", show_default=True, help="Comma-separated seeds for axiom sampling.")
@click.option("--tolerance", default=1e-9, show_default=True, help="Relative slack on inequalities.")
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True)
def verify(instance_path, p, seeds, tolerance, budget):
    """Check the algorithm's guarantees on one instance against exact oracles."""
    try:
        param = _param(p, None)
        seed_list = [int(s) for s in seeds.split(",") if s.strip()]
        instance = load_instance(instance_path)
        results = run_verification(instance, param, seed_list, tolerance, budget=budget)
    except ValueError as exc:
        _fail(InputError(str(exc)))
    except FairPMeanError as exc:
        _fail(exc)
    for r in results:
        click.echo(r.line())
    ok = all(r.passed for r in results)
    click.echo(f"{'ALL PASS' if ok else 'FAILED'}: {sum(r.passed for r in results)}/{len(results)} checks")
    sys.exit(0 if ok else 1)


@main.command()
@click.argument("family", type=click.Choice(["random", "xos_hard", "partition"]))
@click.option("--kind", default="additive", show_default=True, help="Oracle kind for random instances.")
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--m", "m", type=int, default=4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--delta", type=float, default=0.1, show_default=True)
@click.option("--identical/--non-identical", default=False, show_default=True)
@click.option("--s", "s", default=None, help="Comma-separated positive integers (partition family).")
@click.option("--param", "params", multiple=True, help="Extra random-family parameter as key=value.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
def generate(family, kind, n, m, seed, delta, identical, s, params, out_path):
    """Write an instance JSON file for one of the built-in families."""
    try:
        if family == "random":
            extra = {}
            for item in params:
                key, _, val = item.partition("=")
                if key not in {"clauses", "cover_size", "universe", "cap_fraction", "zero_prob"}:
                    raise InputError(f"unknown parameter {key!r}")
                extra[key] = float(val) if key in {"cap_fraction", "zero_prob"} else int(val)
            instance = gen_random(kind, n, m, seed, **extra)
        elif family == "xos_hard":
            instance = gen_xos_hard(n, delta, seed, identical)
        else:
            if not s:
                raise InputError("--s is required for the partition family")
            instance = gen_partition_reduction([int(x) for x in s.split(",")])
    except ValueError as exc:
        _fail(exc if isinstance(exc, InputError) else InputError(str(exc)))
    except FairPMeanError as exc:
        _fail(exc)
    _emit(dumps_instance(instance), out_path)


@main.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="CSV destination (default stdout).")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--timing/--no-timing", default=True, show_default=True, help="Fill the ms column.")
def benchmark(config_path, out_path, jobs, timing):
    """Run a grid of (family, p, seed, algorithm) cells and write CSV."""
    try:
        config = BenchmarkConfig.load(config_path)
        rows = run_benchmark(config, jobs=jobs, timing=timing)
    except FairPMeanError as exc:
        _fail(exc)
    _emit(rows_to_csv(rows), out_path)


if __name__ == "__main__":
    main()
