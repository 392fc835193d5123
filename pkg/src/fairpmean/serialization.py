"""Instance JSON reading and writing.

Two document shapes are accepted::

    {"n": 2, "m": 3, "agents": [{"kind": "additive", "values": [...]}, ...]}
    {"kind": "xos_hard", "n": 3, "m": 9, "delta": 0.1, "seed": 0, "identical": false}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import InputError
from .generators import XosHardInstance, gen_xos_hard
from .valuations import (
    AdditiveOracle,
    BudgetAdditiveOracle,
    CountingOracle,
    CoverageOracle,
    Instance,
    ValuationOracle,
    XOSOracle,
)

_AGENT_FIELDS = {
    "additive": {"kind", "values"},
    "xos": {"kind", "clauses"},
    "budget_additive": {"kind", "values", "cap"},
    "coverage": {"kind", "universe", "goods"},
}
_XOS_HARD_FIELDS = {"kind", "n", "m", "delta", "seed", "identical"}


def _require(obj: dict, allowed: set[str], where: str, optional: frozenset = frozenset()) -> None:
    if not isinstance(obj, dict):
        raise InputError(f"{where} must be an object")
    unknown = set(obj) - allowed
    if unknown:
        raise InputError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = allowed - optional - set(obj)
    if missing:
        raise InputError(f"{where}: missing field(s) {sorted(missing)}")


def _int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InputError(f"{what} must be an integer, got {x!r}")
    return x


def oracle_from_dict(d: dict, m: int, where: str = "agent") -> ValuationOracle:
    kind = d.get("kind") if isinstance(d, dict) else None
    if kind not in _AGENT_FIELDS:
        raise InputError(f"{where}: unknown kind {kind!r}")
    _require(d, _AGENT_FIELDS[kind], where)
    try:
        if kind == "additive":
            o: ValuationOracle = AdditiveOracle(d["values"])
        elif kind == "xos":
            if not d["clauses"]:
                raise InputError(f"{where}: xos needs at least one clause")
            o = XOSOracle(d["clauses"])
        elif kind == "budget_additive":
            o = BudgetAdditiveOracle(d["values"], d["cap"])
        else:
            o = CoverageOracle(_int(d["universe"], "universe"), d["goods"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from None
    if o.m != m:
        raise InputError(f"{where}: defined on {o.m} goods, expected {m}")
    return o


def instance_from_dict(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise InputError("instance document must be a JSON object")
    if doc.get("kind") == "xos_hard":
        _require(doc, _XOS_HARD_FIELDS, "xos_hard instance", frozenset({"m"}))
        n = _int(doc["n"], "n")
        if "m" in doc and doc["m"] != n * n:
            raise InputError(f"xos_hard instance needs m = n**2 = {n * n}, got {doc['m']}")
        if not isinstance(doc["identical"], bool):
            raise InputError("identical must be a boolean")
        return gen_xos_hard(n, float(doc["delta"]), _int(doc["seed"], "seed"), doc["identical"])
    _require(doc, {"n", "m", "agents"}, "instance")
    n, m = _int(doc["n"], "n"), _int(doc["m"], "m")
    agents = doc["agents"]
    if not isinstance(agents, list) or len(agents) != n:
        raise InputError(f"agents must be a list of length n = {n}")
    oracles = tuple(oracle_from_dict(a, m, f"agent {i}") for i, a in enumerate(agents))
    return Instance(n, m, oracles)


def instance_to_dict(instance: Instance) -> dict:
    if isinstance(instance, XosHardInstance):
        return {
            "kind": "xos_hard",
            "n": instance.n,
            "m": instance.m,
            "delta": instance.delta,
            "seed": instance.seed,
            "identical": instance.identical,
        }
    agents = []
    for o in instance.oracles:
        inner = o.inner if isinstance(o, CountingOracle) else o
        agents.append(inner.to_dict())
    return {"n": instance.n, "m": instance.m, "agents": agents}


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    return instance_from_dict(doc)


def load_instance(path: str | Path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return loads_instance(text)


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(instance))
