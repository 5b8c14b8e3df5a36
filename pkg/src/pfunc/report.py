"""Check outcomes and their JSON form."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

REPORT_SCHEMA = "pfunc-report/1"


@dataclass
class Subcheck:
    name: str
    passed: bool
    worst_value: float
    location: Optional[tuple] = None
    tolerance: float = 0.0

    def to_dict(self):
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "worst_value": self.worst_value,
            "location": None if self.location is None else list(self.location),
            "tolerance": self.tolerance,
        }


@dataclass
class CheckReport:
    """Outcome of one verification.

    ``kind`` fixes the pass rule: ``ge`` means worst_residual >= -tolerance,
    ``le`` means worst_residual <= tolerance, ``approx`` means
    |worst_residual| <= tolerance and ``gt`` means worst_residual > tolerance.
    """

    check_id: str
    passed: bool
    worst_residual: float
    worst_location: Optional[tuple]
    tolerance: float
    kind: str = "ge"
    stats: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    subchecks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    vacuous: bool = False
    error: Optional[dict] = None

    def to_dict(self):
        out = {
            "id": self.check_id,
            "pass": bool(self.passed),
            "kind": self.kind,
            "worst_residual": self.worst_residual,
            "worst_location": None if self.worst_location is None else list(self.worst_location),
            "tolerance": self.tolerance,
            "stats": dict(self.stats),
            "provenance": dict(self.provenance),
            "vacuous": bool(self.vacuous),
        }
        if self.subchecks:
            out["subchecks"] = [s.to_dict() for s in self.subchecks]
        if self.details:
            out["details"] = dict(self.details)
        if self.error is not None:
            out["error"] = dict(self.error)
        return out


def rule_passes(kind: str, worst: float, tol: float) -> bool:
    if kind == "ge":
        return worst >= -tol
    if kind == "le":
        return worst <= tol
    if kind == "approx":
        return abs(worst) <= tol
    if kind == "gt":
        return worst > tol
    raise ValueError(f"unknown check kind {kind!r}")


def field_stats(values) -> dict:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return {"min": None, "max": None, "mean": None}
    return {"min": float(v.min()), "max": float(v.max()), "mean": float(v.mean())}


def _num(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) or v is None for v in seq):
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")
