"""Machine-readable verification reports (JSON schema version 1)."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from typing import Optional

SCHEMA_VERSION = 1


def _jsonable(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    if hasattr(value, "item"):  # numpy scalars
        return value.item()
    return value


@dataclass
class VerificationReport:
    """Outcome of one identity / residual / foliation sweep.

    Invariant: ``passed`` is exactly ``max_abs_err <= tolerance``.
    """

    subject: str
    parameters: dict
    grid: Optional[object]  # GridSpec or None (probe lists)
    points_checked: int
    max_abs_err: float
    mean_abs_err: float
    worst_point: Optional[dict]
    policy: str
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.max_abs_err <= self.tolerance)

    def to_dict(self, include_timestamp: bool = True) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "subject": self.subject,
            "parameters": _jsonable(self.parameters),
            "grid": _jsonable(self.grid) if self.grid is not None else None,
            "points_checked": int(self.points_checked),
            "max_abs_err": float(self.max_abs_err),
            "mean_abs_err": float(self.mean_abs_err),
            "worst_point": _jsonable(self.worst_point) if self.worst_point else None,
            "policy": self.policy,
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }
        if include_timestamp:
            out["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
        return out

    def to_json(self, include_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(include_timestamp), indent=2, sort_keys=True) + "\n"

    def write(self, path: str, include_timestamp: bool = True) -> None:
        """Atomic write (temp file + rename), LF endings, deterministic key order."""
        tmp = f"{path}.tmp"
        with open(tmp, "w", newline="\n") as fh:
            fh.write(self.to_json(include_timestamp))
        os.replace(tmp, path)
