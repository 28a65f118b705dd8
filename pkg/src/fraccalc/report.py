"""Verification reports, ladder verdicts and rate fits."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

__all__ = [
    "Verdict",
    "VerificationReport",
    "fit_rate",
    "is_decreasing",
    "ladder_verdict",
    "diverges",
    "DEFAULT_LADDER",
]

DEFAULT_LADDER = (256, 1024, 4096)
# errors below this are treated as exact zeros when judging monotonicity
ZERO_FLOOR = 1e-13


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    DIVERGES = "diverges-as-expected"


def fit_rate(grid_sizes: Sequence[int], errors: Sequence[float]) -> float | None:
    """Least-squares slope p of log(error) against log(h), so error ~ h^p."""
    pts = [(n, e) for n, e in zip(grid_sizes, errors) if e > ZERO_FLOOR and math.isfinite(e)]
    if len(pts) < 2:
        return None
    logh = np.log([1.0 / n for n, _ in pts])
    loge = np.log([e for _, e in pts])
    return float(np.polyfit(logh, loge, 1)[0])


def is_decreasing(errors: Sequence[float], floor: float = ZERO_FLOOR) -> bool:
    for prev, cur in zip(errors, errors[1:]):
        if cur <= floor:
            continue
        if not cur < prev:
            return False
    return True


def ladder_verdict(errors: Sequence[float], threshold: float) -> "Verdict":
    ok = is_decreasing(errors) and errors[-1] <= threshold
    return Verdict.PASS if ok else Verdict.FAIL


def diverges(values: Sequence[float], factor: float = 1.2, min_levels: int = 3) -> bool:
    """Growth by at least ``factor`` between every consecutive pair of levels."""
    if len(values) < min_levels:
        return False
    for prev, cur in zip(values, values[1:]):
        if not (prev > 0 and cur >= factor * prev):
            return False
    return True


def _clean(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class VerificationReport:
    """Outcome of one identity or inequality check on a grid ladder."""

    identity: str
    params: dict = field(default_factory=dict)
    grid_sizes: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    rate: float | None = None
    verdict: Verdict = Verdict.FAIL
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict in (Verdict.PASS, Verdict.DIVERGES)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "identity": self.identity,
            "params": self.params,
            "grid_sizes": list(self.grid_sizes),
            "errors": list(self.errors),
            "rate": self.rate,
            "verdict": self.verdict,
        }
        if self.details:
            d["details"] = self.details
        if include_timing:
            d["wall_time"] = self.wall_time
        return _clean(d)

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "error"])
        for n, e in zip(self.grid_sizes, self.errors):
            w.writerow([n, f"{e:.17g}"])
        return buf.getvalue()

    def summary(self) -> str:
        errs = ", ".join(f"{e:.3g}" for e in self.errors)
        rate = "n/a" if self.rate is None else f"{self.rate:.2f}"
        return f"{self.identity}: {self.verdict.value} [errors {errs}; rate {rate}]"
