"""JSON schema (version 1) for instances, solutions and embeddings.

Instance document::

    {"schema": 1, "kind": "instance", "name": str, "variant": "cvrp",
     "coords": [[x, y], ...],            # node 0 is the depot
     "demands": [0, d1, ...] | null,     # per node, depot entry 0
     "capacity": int | null,
     "windows": [[0.0, null], [a1, b1], ...] | null,   # null upper = open
     "service": [0.0, s1, ...] | null,
     "prizes": [0.0, p1, ...] | null,
     "pd_pairs": [[pickup, delivery], ...] | null,
     "meta": {...}}

Solution document::

    {"schema": 1, "kind": "solution", "name": str, "instance": {...},
     "routes": [[0, ..., 0], ...], "travel": float, "prize_collected": float,
     "objective": float, "trace_length": int, "config": {...}}

Floats are written with ``repr`` precision, so a round trip is lossless.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .core import Instance, Solution, Variant
from .errors import SchemaError

SCHEMA_VERSION = 1


def _opt_list(a):
    return None if a is None else np.asarray(a).tolist()


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    windows = None
    if inst.windows is not None:
        windows = [[float(a), None if math.isinf(b) else float(b)] for a, b in inst.windows]
    return {
        "schema": SCHEMA_VERSION,
        "kind": "instance",
        "name": inst.name,
        "variant": inst.variant.value,
        "coords": inst.coords.tolist(),
        "demands": _opt_list(inst.demands),
        "capacity": inst.capacity,
        "windows": windows,
        "service": _opt_list(inst.service),
        "prizes": _opt_list(inst.prizes),
        "pd_pairs": None if inst.pd_pairs is None else [list(p) for p in inst.pd_pairs],
        "meta": inst.meta,
    }


def _check(doc: dict, kind: str) -> None:
    if not isinstance(doc, dict):
        raise SchemaError(f"expected a JSON object for {kind}")
    if doc.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {doc.get('schema')!r} (expected {SCHEMA_VERSION})")
    if doc.get("kind") != kind:
        raise SchemaError(f"expected kind {kind!r}, got {doc.get('kind')!r}")


def instance_from_dict(doc: dict) -> Instance:
    _check(doc, "instance")
    try:
        windows = doc.get("windows")
        if windows is not None:
            windows = [[a, math.inf if b is None else b] for a, b in windows]
        return Instance(
            variant=Variant.parse(doc["variant"]),
            coords=doc["coords"],
            demands=doc.get("demands"),
            capacity=doc.get("capacity"),
            windows=windows,
            service=doc.get("service"),
            prizes=doc.get("prizes"),
            pd_pairs=doc.get("pd_pairs"),
            name=doc.get("name", ""),
            meta=doc.get("meta") or {},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed instance document: {exc}") from exc


def solution_to_dict(inst: Instance, sol: Solution, *, extra: dict | None = None) -> dict[str, Any]:
    from .core import solution_cost

    cost = solution_cost(inst, sol)
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": "solution",
        "name": inst.name,
        "instance": instance_to_dict(inst),
        "routes": [list(map(int, r)) for r in sol.routes],
        "travel": cost.travel,
        "prize_collected": cost.prize_collected,
        "objective": cost.objective,
    }
    doc.update(extra or {})
    return doc


def solution_from_dict(doc: dict) -> tuple[Instance, Solution]:
    _check(doc, "solution")
    try:
        inst = instance_from_dict(doc["instance"])
        sol = Solution([[int(v) for v in r] for r in doc["routes"]])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed solution document: {exc}") from exc
    return inst, sol


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, allow_nan=False) + "\n"


def write_json(path: str | Path, doc: dict) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8", newline="\n")


def read_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
