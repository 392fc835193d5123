"""Batch experiments: approximation ratios on instance families, written as CSV."""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .allocator import alg_solve, combined_solve, matching_baseline
from .errors import BudgetExceededError, InputError
from .exact import DEFAULT_BUDGET, exact_optimum, welfare_ratio
from .generators import KINDS, gen_partition_reduction, gen_random, gen_xos_hard
from .valuations import Instance
from .welfare import NEG_INF, WelfareParam, parse_p

COLUMNS = ["family", "n", "m", "p", "seed", "algorithm", "welfare", "opt_welfare", "ratio", "iterations", "queries", "ms"]
ALGORITHMS = ("alg", "matching", "combined", "exact")
_RANDOM_PARAMS = {"clauses", "cap_fraction", "universe", "cover_size", "zero_prob"}


@dataclass(frozen=True)
class FamilySpec:
    label: str
    family: str
    options: dict

    def build(self, seed: int) -> Instance:
        o = self.options
        if self.family == "random":
            return gen_random(o["kind"], o["n"], o["m"], seed, **o.get("params", {}))
        if self.family == "xos_hard":
            return gen_xos_hard(o["n"], o.get("delta", 0.1), seed, o.get("identical", False))
        return gen_partition_reduction(o["s"])


def _family(entry: Any, index: int) -> FamilySpec:
    if not isinstance(entry, dict) or "family" not in entry:
        raise InputError(f"families[{index}] must be an object with a 'family' field")
    entry = dict(entry)
    family = entry.pop("family")
    label = entry.pop("label", None)
    if family == "random":
        allowed = {"kind", "n", "m", "params"}
        if entry.get("kind") not in KINDS:
            raise InputError(f"families[{index}]: kind must be one of {KINDS}")
        if set(entry.get("params", {})) - _RANDOM_PARAMS:
            raise InputError(f"families[{index}]: unknown params")
        label = label or f"random:{entry['kind']}"
    elif family == "xos_hard":
        allowed = {"n", "delta", "identical"}
        label = label or ("xos_hard:identical" if entry.get("identical") else "xos_hard")
    elif family == "partition":
        allowed = {"s"}
        label = label or "partition"
    else:
        raise InputError(f"families[{index}]: unknown family {family!r}")
    unknown = set(entry) - allowed
    if unknown:
        raise InputError(f"families[{index}]: unknown field(s) {sorted(unknown)}")
    if "," in label:
        raise InputError("family labels may not contain commas")
    return FamilySpec(label, family, entry)


@dataclass(frozen=True)
class BenchmarkConfig:
    families: tuple[FamilySpec, ...]
    ps: tuple[float, ...]
    seeds: tuple[int, ...]
    algorithms: tuple[str, ...]
    exact_budget: int = DEFAULT_BUDGET

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchmarkConfig":
        if not isinstance(doc, dict):
            raise InputError("benchmark config must be a JSON object")
        unknown = set(doc) - {"families", "p", "seeds", "algorithms", "exact_budget"}
        if unknown:
            raise InputError(f"unknown config field(s) {sorted(unknown)}")
        try:
            families = tuple(_family(e, i) for i, e in enumerate(doc["families"]))
            ps = tuple(parse_p(x) for x in doc["p"])
            seeds = tuple(int(s) for s in doc["seeds"])
            algorithms = tuple(doc["algorithms"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad benchmark config: {exc}") from None
        bad = [a for a in algorithms if a not in ALGORITHMS]
        if bad:
            raise InputError(f"unknown algorithm(s) {bad}")
        for p in ps:
            WelfareParam(p)
            if "matching" in algorithms and p > 0:
                raise InputError("the matching baseline needs p <= 0")
            if "combined" in algorithms and p != 0:
                raise InputError("the combined strategy needs p = 0")
        if not (families and ps and seeds and algorithms):
            raise InputError("families, p, seeds and algorithms must all be nonempty")
        return cls(families, ps, seeds, algorithms, int(doc.get("exact_budget", DEFAULT_BUDGET)))

    @classmethod
    def load(cls, path: str | Path) -> "BenchmarkConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(doc)

    def cells(self) -> list[tuple]:
        return [
            (fi, p, seed, alg)
            for fi in range(len(self.families))
            for p in self.ps
            for seed in self.seeds
            for alg in self.algorithms
        ]


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    if x == NEG_INF:
        return "-inf"
    return repr(float(x))


def _run_cell(config: BenchmarkConfig, cell: tuple, timing: bool) -> dict:
    fi, p, seed, algorithm = cell
    fam = config.families[fi]
    instance = fam.build(seed)
    param = WelfareParam(p)
    counted = instance.counting()
    iterations = ""
    start = time.perf_counter()
    if algorithm == "alg":
        alloc, trace = alg_solve(counted, param)
        iterations = str(trace.T)
    elif algorithm == "matching":
        alloc = matching_baseline(counted, param)
    elif algorithm == "combined":
        alloc = combined_solve(counted, param)
    else:
        alloc = exact_optimum(counted, param, config.exact_budget).allocation
    elapsed = (time.perf_counter() - start) * 1000
    queries = counted.query_count()
    welfare = alloc.welfare(instance, param)
    try:
        opt = exact_optimum(instance, param, config.exact_budget).welfare
        ratio = welfare_ratio(opt, welfare)
    except BudgetExceededError:
        opt = ratio = None
    return {
        "family": fam.label,
        "n": str(instance.n),
        "m": str(instance.m),
        "p": _fmt(p),
        "seed": str(seed),
        "algorithm": algorithm,
        "welfare": _fmt(welfare),
        "opt_welfare": _fmt(opt),
        "ratio": _fmt(ratio),
        "iterations": iterations,
        "queries": str(queries),
        "ms": f"{elapsed:.3f}" if timing else "",
    }


def run_benchmark(config: BenchmarkConfig, jobs: int = 1, timing: bool = True) -> list[dict]:
    cells = config.cells()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_cell, [config] * len(cells), cells, [timing] * len(cells)))
    else:
        rows = [_run_cell(config, c, timing) for c in cells]
    # pool.map keeps cell order, so rows come out in config order either way
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
