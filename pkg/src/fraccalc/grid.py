"""Intervals, uniform grids and grid functions."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

import numpy as np

__all__ = [
    "EPS_S",
    "Interval",
    "Grid",
    "EndpointPolicy",
    "GridFunction",
    "frac_order",
    "eval_pw_linear",
    "read_csv",
    "write_csv",
]

EPS_S = 1e-6


def frac_order(s: float, k: int = 1) -> float:
    """Validate and clamp a fractional order with k - 1 < s < k.

    Orders within EPS_S of the open interval's ends are clamped into
    [k - 1 + EPS_S, k - EPS_S]; anything farther out is rejected.
    """
    s = float(s)
    if not math.isfinite(s):
        raise ValueError(f"fractional order must be finite, got {s}")
    lo, hi = k - 1 + EPS_S, k - EPS_S
    if s < k - 1 or s > k:
        raise ValueError(f"fractional order {s} outside ({k - 1}, {k})")
    return min(max(s, lo), hi)


@dataclass(frozen=True)
class Interval:
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if not self.a < self.b:
            raise ValueError(f"need a < b, got ({self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a

    def reflect(self, x):
        """Q(x) = a + b - x."""
        return self.a + self.b - np.asarray(x, dtype=float)


UNIT = Interval(0.0, 1.0)


@dataclass(frozen=True)
class Grid:
    interval: Interval
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs an integer n >= 2, got {self.n}")

    @classmethod
    def on(cls, a: float, b: float, n: int) -> "Grid":
        return cls(Interval(a, b), n)

    @property
    def a(self) -> float:
        return self.interval.a

    @property
    def b(self) -> float:
        return self.interval.b

    @property
    def h(self) -> float:
        return self.interval.length / self.n

    @property
    def nodes(self) -> np.ndarray:
        x = self.a + self.h * np.arange(self.n + 1)
        x[-1] = self.b
        return x

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def refine(self, factor: int) -> "Grid":
        return Grid(self.interval, self.n * factor)


class EndpointPolicy(str, Enum):
    EXACT = "exact"
    CELL_AVERAGED = "cell-averaged"


@dataclass(frozen=True)
class GridFunction:
    """Node values on a uniform grid, read as their piecewise-linear interpolant.

    ``flags`` maps node indices to labels (``singular``, ``cell-averaged``,
    ``near-atom``, ...).  ``cell_means`` optionally carries the dual-cell mean
    at flagged nodes whose stored value is a point value; quadratures use it
    in place of the node value.
    """

    grid: Grid
    values: np.ndarray
    endpoint_policy: EndpointPolicy = EndpointPolicy.EXACT
    flags: Mapping[int, str] = field(default_factory=dict)
    cell_means: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise ValueError(f"expected {self.grid.n + 1} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "flags", dict(self.flags))
        object.__setattr__(self, "cell_means", dict(self.cell_means))

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def with_values(self, values, **kw) -> "GridFunction":
        return GridFunction(self.grid, values, kw.get("endpoint_policy", EndpointPolicy.EXACT),
                            kw.get("flags", {}), kw.get("cell_means", {}))

    def quadrature_values(self) -> np.ndarray:
        """Node values with stored dual-cell means substituted at flagged nodes."""
        if not self.cell_means:
            return self.values
        q = self.values.copy()
        for j, m in self.cell_means.items():
            q[j] = m
        return q

    def integral(self) -> float:
        return float(np.dot(self.grid.trapezoid_weights(), self.quadrature_values()))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c: float) -> "GridFunction":
        return self.with_values(self.values * float(c), endpoint_policy=self.endpoint_policy,
                                flags=self.flags,
                                cell_means={j: m * float(c) for j, m in self.cell_means.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return self * -1.0

    @classmethod
    def zeros(cls, grid: Grid) -> "GridFunction":
        return cls(grid, np.zeros(grid.n + 1))

    @classmethod
    def from_callable(cls, grid: Grid, f) -> "GridFunction":
        return cls(grid, np.asarray(f(grid.nodes), dtype=float))


def _same_grid(u: GridFunction, v: GridFunction) -> None:
    if u.grid != v.grid:
        raise ValueError("grid functions live on different grids")


def eval_pw_linear(u: GridFunction, x):
    """Evaluate the piecewise-linear interpolant of ``u`` at ``x`` (scalar or array)."""
    g = u.grid
    xa = np.asarray(x, dtype=float)
    tol = 1e-12 * g.interval.length
    if np.any(xa < g.a - tol) or np.any(xa > g.b + tol):
        raise ValueError("evaluation point outside [a, b]")
    t = np.clip((xa - g.a) / g.h, 0.0, g.n)
    k = np.minimum(np.floor(t).astype(int), g.n - 1)
    lam = t - k
    out = (1.0 - lam) * u.values[k] + lam * u.values[k + 1]
    return float(out) if np.ndim(x) == 0 else out


def write_csv(u: GridFunction, path=None) -> str:
    """Serialize as ``x,value[,flags]`` with 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    with_flags = bool(u.flags)
    w.writerow(["x", "value", "flags"] if with_flags else ["x", "value"])
    for j, (xj, vj) in enumerate(zip(u.x, u.values)):
        row = [f"{xj:.17g}", f"{vj:.17g}"]
        if with_flags:
            row.append(u.flags.get(j, ""))
        w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def read_csv(path) -> GridFunction:
    """Read a CSV written by :func:`write_csv`; the grid must be uniform."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if len(rows) < 3:
        raise ValueError("need at least three nodes")
    x = np.array([float(r["x"]) for r in rows])
    v = np.array([float(r["value"]) for r in rows])
    grid = Grid.on(x[0], x[-1], len(x) - 1)
    if not np.allclose(x, grid.nodes, rtol=0, atol=1e-9 * grid.interval.length):
        raise ValueError("CSV nodes are not uniformly spaced")
    flags = {j: r["flags"] for j, r in enumerate(rows) if r.get("flags")}
    return GridFunction(grid, v, flags=flags)
