"""Closed-form test functions with singularity metadata, and grid sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special as sps

from .grid import UNIT, EndpointPolicy, Grid, GridFunction, Interval
from .special import gamma_fn

__all__ = ["Tag", "Singularity", "AnalyticFunction", "sample", "parse_function", "cantor_function"]


class Tag(str, Enum):
    ZERO = "zero"
    CONSTANT = "constant"
    LINEAR = "linear"
    POWER_LAW = "power"
    CRITICAL_POWER = "critical-power"
    SHIFTED_CRITICAL_POWER = "shifted-critical"
    INDICATOR = "indicator"
    COSINE = "cosine"
    SINE = "sine"
    POWER_COSINE = "power-cosine"
    LOG_KERNEL_LEFT = "log-left"
    LOG_KERNEL_RIGHT = "log-right"
    CANTOR_STAGE = "cantor"


# number of parameters each tag takes
_ARITY = {
    Tag.ZERO: 0, Tag.CONSTANT: 1, Tag.LINEAR: 0, Tag.POWER_LAW: 1, Tag.CRITICAL_POWER: 1,
    Tag.SHIFTED_CRITICAL_POWER: 3, Tag.INDICATOR: 2, Tag.COSINE: 0, Tag.SINE: 0,
    Tag.POWER_COSINE: 1, Tag.LOG_KERNEL_LEFT: 1, Tag.LOG_KERNEL_RIGHT: 1, Tag.CANTOR_STAGE: 1,
}


@dataclass(frozen=True)
class Singularity:
    """A point where f is unbounded or discontinuous.

    ``side`` is +1 if the blow-up is approached from the right (t -> p+),
    -1 from the left, 0 for a bounded jump.  ``exponent`` e describes
    |t - p|^e behaviour; ``None`` marks a logarithmic-type blow-up.
    """

    point: float
    side: int
    exponent: Optional[float] = 0.0


def cantor_function(x, m: int):
    """Stage-m ternary Cantor function on [0, 1] (piecewise linear, C_0(x) = x)."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    scale = np.ones_like(x)
    acc = np.zeros_like(x)
    y = x.copy()
    for _ in range(m):
        left = y < 1.0 / 3.0
        right = y > 2.0 / 3.0
        mid = ~(left | right)
        acc = acc + np.where(right | mid, 0.5 * scale, 0.0)
        y = np.where(left, 3.0 * y, np.where(right, 3.0 * y - 2.0, 0.0))
        # in the middle third the stage-m function is flat
        scale = np.where(mid, 0.0, 0.5 * scale)
    return acc + scale * y


@dataclass(frozen=True)
class AnalyticFunction:
    """A tagged closed-form function on an interval.

    PowerLaw(mu) is (x-a)^(mu-1); CriticalPower(s0) is (x-a)^(s0-1)/Gamma(s0);
    ShiftedCriticalPower(c, d, s0) is 1_(c,d](x) (x-c)^(s0-1)/Gamma(s0);
    PowerCosine(k) is (x-a)^k cos x; the log kernels live on (0, 1).
    """

    tag: Tag
    params: tuple = ()
    interval: Interval = UNIT

    def __post_init__(self):
        object.__setattr__(self, "tag", Tag(self.tag))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.params) != _ARITY[self.tag]:
            raise ValueError(f"{self.tag.value} takes {_ARITY[self.tag]} parameter(s)")
        a, b = self.interval.a, self.interval.b
        t, p = self.tag, self.params
        if t is Tag.POWER_LAW and p[0] <= 0:
            raise ValueError("PowerLaw needs mu > 0")
        if t in (Tag.CRITICAL_POWER,) and not 0 < p[0] < 1:
            raise ValueError("CriticalPower needs 0 < s0 < 1")
        if t is Tag.SHIFTED_CRITICAL_POWER and not (a < p[0] < p[1] < b and 0 < p[2] < 1):
            raise ValueError("ShiftedCriticalPower needs a < c < d < b and 0 < s0 < 1")
        if t is Tag.INDICATOR and not (a <= p[0] < p[1] <= b):
            raise ValueError("Indicator needs a <= c < d <= b")
        if t in (Tag.LOG_KERNEL_LEFT, Tag.LOG_KERNEL_RIGHT) and self.interval != UNIT:
            raise ValueError("log kernels are defined on (0, 1)")
        if t is Tag.LOG_KERNEL_LEFT and p[0] <= 1:
            raise ValueError("LogKernelLeft needs beta > 1")
        if t is Tag.LOG_KERNEL_RIGHT and not 0 < p[0] < 1:
            raise ValueError("LogKernelRight needs 0 < s0 < 1")
        if t is Tag.CANTOR_STAGE and (p[0] < 0 or p[0] != int(p[0])):
            raise ValueError("CantorStage needs an integer m >= 0")
        if t is Tag.POWER_COSINE and (p[0] < 0 or p[0] != int(p[0])):
            raise ValueError("PowerCosine needs an integer k >= 0")

    # -- construction helpers -------------------------------------------------
    @classmethod
    def make(cls, tag, *params, interval: Interval = UNIT) -> "AnalyticFunction":
        return cls(Tag(tag), tuple(params), interval)

    @property
    def label(self) -> str:
        if not self.params:
            return self.tag.value
        return self.tag.value + ":" + ":".join(f"{p:g}" for p in self.params)

    # -- evaluation ---------------------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a = self.interval.a
        t, p = self.tag, self.params
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if t is Tag.ZERO:
                out = np.zeros_like(x)
            elif t is Tag.CONSTANT:
                out = np.full_like(x, p[0])
            elif t is Tag.LINEAR:
                out = x - a
            elif t is Tag.POWER_LAW:
                out = (x - a) ** (p[0] - 1.0)
            elif t is Tag.CRITICAL_POWER:
                out = (x - a) ** (p[0] - 1.0) / gamma_fn(p[0])
            elif t is Tag.SHIFTED_CRITICAL_POWER:
                c, d, s0 = p
                inside = (x > c) & (x <= d)
                out = np.where(inside, np.abs(x - c) ** (s0 - 1.0), 0.0) / gamma_fn(s0)
            elif t is Tag.INDICATOR:
                out = np.where((x > p[0]) & (x <= p[1]), 1.0, 0.0)
            elif t is Tag.COSINE:
                out = np.cos(x)
            elif t is Tag.SINE:
                out = np.sin(x)
            elif t is Tag.POWER_COSINE:
                out = (x - a) ** p[0] * np.cos(x)
            elif t is Tag.LOG_KERNEL_LEFT:
                inside = (x > 0) & (x <= 0.5)
                xs = np.where(inside, x, 0.25)
                out = np.where(inside, 1.0 / (xs * np.abs(np.log(xs)) ** p[0]), 0.0)
            elif t is Tag.LOG_KERNEL_RIGHT:
                inside = (x >= 0.5) & (x < 1)
                ys = np.where(inside, 1.0 - x, 0.25)
                out = np.where(inside, 1.0 / (ys ** p[0] * np.abs(np.log(ys))), 0.0)
            else:  # CANTOR_STAGE
                L = self.interval.length
                out = cantor_function((x - a) / L, int(p[0]))
        return out.item() if out.ndim == 0 else out

    def singularities(self) -> list[Singularity]:
        a = self.interval.a
        t, p = self.tag, self.params
        if t is Tag.POWER_LAW and p[0] < 1:
            return [Singularity(a, +1, p[0] - 1.0)]
        if t is Tag.CRITICAL_POWER:
            return [Singularity(a, +1, p[0] - 1.0)]
        if t is Tag.SHIFTED_CRITICAL_POWER:
            return [Singularity(p[0], +1, p[2] - 1.0), Singularity(p[1], 0)]
        if t is Tag.INDICATOR:
            return [Singularity(q, 0) for q in p if self.interval.a < q < self.interval.b]
        if t is Tag.LOG_KERNEL_LEFT:
            return [Singularity(0.0, +1, None), Singularity(0.5, 0)]
        if t is Tag.LOG_KERNEL_RIGHT:
            return [Singularity(0.5, 0), Singularity(1.0, -1, None)]
        return []

    def antiderivative(self) -> Optional[Callable]:
        """Closed-form primitive F with F(a) = 0 where one is available."""
        a = self.interval.a
        t, p = self.tag, self.params
        if t is Tag.ZERO:
            return lambda x: np.zeros_like(np.asarray(x, dtype=float))
        if t is Tag.CONSTANT:
            return lambda x: p[0] * (np.asarray(x) - a)
        if t is Tag.LINEAR:
            return lambda x: 0.5 * (np.asarray(x) - a) ** 2
        if t is Tag.POWER_LAW:
            return lambda x: np.maximum(np.asarray(x) - a, 0.0) ** p[0] / p[0]
        if t is Tag.CRITICAL_POWER:
            return lambda x: np.maximum(np.asarray(x) - a, 0.0) ** p[0] / gamma_fn(p[0] + 1.0)
        if t is Tag.SHIFTED_CRITICAL_POWER:
            c, d, s0 = p
            return lambda x: (np.clip(np.asarray(x), c, d) - c) ** s0 / gamma_fn(s0 + 1.0)
        if t is Tag.INDICATOR:
            return lambda x: np.clip(np.asarray(x), p[0], p[1]) - p[0]
        if t is Tag.COSINE:
            return lambda x: np.sin(x) - math.sin(a)
        if t is Tag.SINE:
            return lambda x: math.cos(a) - np.cos(x)
        if t is Tag.LOG_KERNEL_LEFT:
            beta = p[0]

            def F(x):
                xs = np.clip(np.asarray(x, dtype=float), 0.0, 0.5)
                with np.errstate(divide="ignore"):
                    g = np.where(xs > 0, (-np.log(np.where(xs > 0, xs, 0.5))) ** (1.0 - beta), 0.0)
                return g / (beta - 1.0)

            return F
        if t is Tag.LOG_KERNEL_RIGHT:
            s0 = p[0]

            def tail(x):
                # integral of f over (x, 1) for x >= 1/2: E1((1 - s0) |log(1 - x)|)
                y = np.clip(1.0 - np.asarray(x, dtype=float), 0.0, 0.5)
                with np.errstate(divide="ignore"):
                    z = (1.0 - s0) * -np.log(np.where(y > 0, y, 1.0))
                return np.where(y > 0, sps.exp1(z), 0.0)

            total = float(sps.exp1((1.0 - s0) * math.log(2.0)))
            return lambda x: total - tail(x)
        return None

    def derivative(self, k: int) -> Callable:
        """k-th classical derivative for smooth members."""
        a = self.interval.a
        t, p = self.tag, self.params
        if k == 0:
            return self.__call__
        if t in (Tag.ZERO, Tag.CONSTANT):
            return lambda x: np.zeros_like(np.asarray(x, dtype=float))
        if t is Tag.LINEAR:
            return (lambda x: np.ones_like(np.asarray(x, dtype=float))) if k == 1 else \
                (lambda x: np.zeros_like(np.asarray(x, dtype=float)))
        if t is Tag.COSINE:
            return lambda x: np.cos(np.asarray(x) + k * math.pi / 2)
        if t is Tag.SINE:
            return lambda x: np.sin(np.asarray(x) + k * math.pi / 2)
        if t is Tag.POWER_LAW:
            mu = p[0] - 1.0
            coef = math.prod(mu - i for i in range(k))
            return lambda x: coef * (np.asarray(x) - a) ** (mu - k) if coef else np.zeros_like(np.asarray(x, dtype=float))
        if t is Tag.POWER_COSINE:
            m = int(p[0])

            def dk(x):
                x = np.asarray(x, dtype=float)
                out = np.zeros_like(x)
                for i in range(min(k, m) + 1):
                    # Leibniz: C(k,i) d^i[(x-a)^m] d^(k-i)[cos]
                    falling = math.prod(m - r for r in range(i))
                    out += math.comb(k, i) * falling * (x - a) ** (m - i) * np.cos(x + (k - i) * math.pi / 2)
                return out

            return dk
        raise ValueError(f"{self.tag.value} has no closed-form derivative")

    def is_continuous(self) -> bool:
        return not self.singularities()


def _dual_cell_mean(f: AnalyticFunction, lo: float, hi: float) -> float:
    F = f.antiderivative()
    if F is not None:
        return float((F(hi) - F(lo)) / (hi - lo))
    pts = [s.point for s in f.singularities() if lo < s.point < hi]
    val, _ = integrate.quad(f, lo, hi, points=pts or None, limit=200)
    return val / (hi - lo)


def sample(f: AnalyticFunction, grid: Grid) -> GridFunction:
    """Sample f at the nodes; singular or discontinuous nodes get dual-cell means.

    The dual cell of node j is [x_j - h/2, x_j + h/2] clipped to [a, b], so at
    an endpoint it is the adjacent half-cell.
    """
    if f.interval != grid.interval:
        raise ValueError("function and grid live on different intervals")
    x = grid.nodes
    vals = np.array(f(x), dtype=float).reshape(x.shape)
    flags: dict[int, str] = {}
    h = grid.h
    for sg in f.singularities():
        j = int(round((sg.point - grid.a) / h))
        if not (0 <= j <= grid.n) or abs(x[j] - sg.point) > 1e-9 * h:
            continue
        lo, hi = max(grid.a, x[j] - h / 2), min(grid.b, x[j] + h / 2)
        vals[j] = _dual_cell_mean(f, lo, hi)
        flags[j] = "cell-averaged"
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise ValueError(f"{f.label}: non-finite sample at nodes {np.flatnonzero(bad)[:5]}")
    policy = EndpointPolicy.CELL_AVERAGED if flags else EndpointPolicy.EXACT
    return GridFunction(grid, vals, policy, flags)


def parse_function(spec: str, interval: Interval = UNIT) -> AnalyticFunction:
    """Parse ``tag[:p1[:p2...]]`` such as ``critical-power:0.5``."""
    parts = spec.strip().split(":")
    try:
        tag = Tag(parts[0].strip().lower())
    except ValueError:
        valid = ", ".join(t.value for t in Tag)
        raise ValueError(f"unknown function tag {parts[0]!r}; valid: {valid}") from None
    params = tuple(float(q) for q in parts[1:] if q.strip())
    return AnalyticFunction(tag, params, interval)
