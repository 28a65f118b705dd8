"""Norms, seminorms and the Hardy functional on grid functions."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import Grid, GridFunction, frac_order
from .report import _clean, diverges

__all__ = [
    "NormReport",
    "lp_norm",
    "weak_lp_quasinorm",
    "gagliardo_seminorm",
    "holder_seminorm",
    "rl_sobolev_norm",
    "hardy_quotient",
    "norm_ladder",
    "restrict",
]


@dataclass
class NormReport:
    kind: str
    params: dict = field(default_factory=dict)
    value: float = 0.0
    divergent: bool = False
    ladder: list = field(default_factory=list)  # [(n, value), ...]
    components: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "params": self.params,
             "value_or_flag": "diverges" if self.divergent else self.value,
             "ladder": [{"n": n, "value": v} for n, v in self.ladder]}
        if self.components:
            d["components"] = self.components
        return _clean(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    return p


def restrict(u: GridFunction, lo: float | None = None, hi: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature values and trapezoid weights for the nodes inside [lo, hi]."""
    g = u.grid
    q = u.quadrature_values()
    w = g.trapezoid_weights()
    if lo is None and hi is None:
        return q, w
    i0 = 0 if lo is None else int(math.ceil((lo - g.a) / g.h - 1e-9))
    i1 = g.n if hi is None else int(math.floor((hi - g.a) / g.h + 1e-9))
    if i1 - i0 < 1:
        raise ValueError("restriction window holds fewer than two nodes")
    w = np.full(i1 - i0 + 1, g.h)
    w[0] = w[-1] = 0.5 * g.h
    return q[i0:i1 + 1], w


def lp_norm(u: GridFunction, p: float = 1.0, lo: float | None = None, hi: float | None = None) -> float:
    """Trapezoidal L^p norm (nodal max for p = inf); flagged nodes use cell means."""
    q, w = restrict(u, lo, hi)
    if p == math.inf:
        return float(np.max(np.abs(q)))
    p = _check_p(p)
    if p == 1:
        return float(np.dot(w, np.abs(q)))
    return float(np.dot(w, np.abs(q) ** p)) ** (1.0 / p)


def weak_lp_quasinorm(u: GridFunction, p: float) -> float:
    """sup_t t |{|u| > t}|^(1/p) for |u| constant on each node's dual cell."""
    p = _check_p(p)
    q = np.abs(u.quadrature_values())
    w = u.grid.trapezoid_weights()
    order = np.argsort(-q, kind="stable")
    levels = q[order]
    measure = np.cumsum(w[order])
    return float(np.max(levels * measure ** (1.0 / p)))


def gagliardo_seminorm(u: GridFunction, s: float, p: float = 1.0) -> NormReport:
    """Discrete W^{s,p} Gagliardo seminorm.

    Distinct cell pairs use the midpoint rule.  On a cell paired with itself
    the interpolant gives |u(x) - u(y)| = |slope| |x - y|, whose double
    integral against |x - y|^(-sp-1) is closed form.
    """
    s = frac_order(s)
    p = _check_p(p)
    g = u.grid
    h, n = g.h, g.n
    v = u.values
    slopes = np.diff(v) / h
    mids = 0.5 * (v[:-1] + v[1:])
    e = p - s * p  # exponent of |x - y| left after the slope factor, minus one
    band = 2.0 * h ** (e + 1.0) * (1.0 / e - 1.0 / (e + 1.0)) * np.sum(np.abs(slopes) ** p)
    off = 0.0
    for m in range(1, n):
        diffs = np.abs(mids[m:] - mids[:-m])
        off += np.sum(diffs ** p if p != 1 else diffs) / (m * h) ** (s * p + 1.0)
    total = band + 2.0 * h * h * off
    return NormReport("gagliardo", {"s": s, "p": p, "n": n}, total ** (1.0 / p), ladder=[(n, total ** (1.0 / p))])


def holder_seminorm(u: GridFunction, beta: float) -> float:
    """max over node pairs of |u_i - u_j| / |x_i - x_j|^beta."""
    if not 0 < beta <= 1:
        raise ValueError("Holder exponent must lie in (0, 1]")
    v, h = u.values, u.grid.h
    best = 0.0
    for m in range(1, u.grid.n + 1):
        best = max(best, float(np.max(np.abs(v[m:] - v[:-m]))) / (m * h) ** beta)
    return best


def rl_sobolev_norm(u: GridFunction, s: float, p: float = 1.0) -> NormReport:
    """||u||_p + ||I^(1-s) u||_p + ||D^s u||_p (RL derivative)."""
    from .derivative import DerivKind, frac_deriv
    from .integral import frac_int

    s = frac_order(s)
    p = _check_p(p)
    parts = {
        "u": lp_norm(u, p),
        "frac_int": lp_norm(frac_int(u, 1.0 - s), p),
        "frac_deriv": lp_norm(frac_deriv(u, s, DerivKind.RL), p),
    }
    val = sum(parts.values())
    return NormReport("rl-sobolev", {"s": s, "p": p, "n": u.grid.n}, val,
                      ladder=[(u.grid.n, val)], components=parts)


def _weighted_cells(g: Grid, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Weights W with int |u|^p dist^(gamma-1) = sum_j W_j |u_j|^p for the interpolant of |u|^p."""
    from .integral import kernel_moments

    n, h = g.n, g.h
    wts = np.zeros(n + 1)
    half = n // 2
    km = kernel_moments(gamma, max(half, 1))
    scale = h ** gamma
    # cells [x_k, x_{k+1}] with x_{k+1} <= midpoint: distance to a is h (k + theta)
    for k in range(half):
        wts[k] += scale * km.far[k]
        wts[k + 1] += scale * km.near[k]
    # mirrored cells on the right half
    for k in range(half):
        wts[n - k] += scale * km.far[k]
        wts[n - k - 1] += scale * km.near[k]
    if n % 2:
        # the middle cell straddles the midpoint; integrate it by Gauss-Legendre
        xg, wg = np.polynomial.legendre.leggauss(20)
        lo, hi = half * h, (half + 1) * h
        t = 0.5 * (xg + 1.0) * h + lo
        dist = np.minimum(t, n * h - t)
        lam = (t - lo) / h
        wts[half] += 0.5 * h * np.sum(wg * (1 - lam) * dist ** (gamma - 1.0))
        wts[half + 1] += 0.5 * h * np.sum(wg * lam * dist ** (gamma - 1.0))
    return wts


def hardy_quotient(u: GridFunction, s: float, p: float = 1.0) -> float:
    """int |u|^p / min(x - a, b - x)^(sp) dx.

    The interpolant of |u|^p is integrated exactly against the weight, so the
    endpoint cells, where the weight blows up, are handled in closed form.
    """
    s = frac_order(s)
    p = _check_p(p)
    if s * p >= 1:
        raise ValueError("Hardy quotient needs s p < 1")
    w = _weighted_cells(u.grid, 1.0 - s * p)
    return float(np.dot(w, np.abs(u.quadrature_values()) ** p))


def norm_ladder(kind: str, norm_fn: Callable[[GridFunction], float], make: Callable[[Grid], GridFunction],
                grids: Sequence[Grid], params: dict | None = None, factor: float = 1.2) -> NormReport:
    """Evaluate a norm across a ladder of grids and flag sustained growth."""
    ladder = []
    for g in grids:
        val = norm_fn(make(g))
        if isinstance(val, NormReport):
            val = val.value
        ladder.append((g.n, float(val)))
    vals = [v for _, v in ladder]
    return NormReport(kind, dict(params or {}), vals[-1], diverges(vals, factor), ladder)
