"""Left and right Riemann-Liouville fractional integrals.

Grid functions are integrated by product integration: the piecewise-linear
interpolant is integrated exactly against the kernel (x - t)^(s-1)/Gamma(s),
cell by cell.  The right-sided operator is the exact mirror of the left one.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np
from scipy import integrate

from .corpus import AnalyticFunction, Singularity, sample
from .grid import Grid, GridFunction, Interval, UNIT, frac_order
from .norms import lp_norm
from .report import DEFAULT_LADDER, VerificationReport, Verdict, fit_rate, is_decreasing, ladder_verdict
from .special import gamma_fn

__all__ = [
    "Side",
    "KernelMoments",
    "kernel_moments",
    "rl_integral_values",
    "frac_int",
    "frac_int_oracle",
    "OracleError",
    "reflect",
    "realize",
    "check_semigroup",
    "check_reflection",
    "check_duality",
    "sweep_s_to_0",
]

Source = Union[AnalyticFunction, GridFunction, Callable[[Grid], GridFunction]]


class Side(str, Enum):
    LEFT = "left"    # a+
    RIGHT = "right"  # b-

    @classmethod
    def parse(cls, value) -> "Side":
        if isinstance(value, Side):
            return value
        v = str(value).lower()
        aliases = {"left": cls.LEFT, "a+": cls.LEFT, "leftaplus": cls.LEFT,
                   "right": cls.RIGHT, "b-": cls.RIGHT, "rightbminus": cls.RIGHT}
        if v not in aliases:
            raise ValueError(f"unknown side {value!r}")
        return aliases[v]


# 16-point Gauss-Legendre rule mapped to [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _cell_integrals(m: np.ndarray, e: float, weight) -> np.ndarray:
    """int_0^1 weight(sigma) (m - 1 + sigma)^e dsigma for integer m >= 2."""
    base = (m[:, None] - 1.0) + _GL_X[None, :]
    return (base ** e * weight(_GL_X)[None, :]) @ _GL_W


@dataclass(frozen=True)
class KernelMoments:
    """Scaled per-cell kernel moments for order gamma on n cells.

    With tau = (x_j - t)/h = m - 1 + sigma on the m-th cell to the left of x_j,
    ``near[m-1] = int_0^1 sigma (m-1+sigma)^(gamma-1)`` weights the cell's left
    node and ``far[m-1] = int_0^1 (1-sigma) (m-1+sigma)^(gamma-1)`` its right
    node.  Multiplying by h^gamma gives the exact moments of the linear hat
    pieces.  ``total = near + far`` is the constant-weight moment.
    """

    gamma: float
    n: int
    near: np.ndarray
    far: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.near + self.far


@lru_cache(maxsize=64)
def kernel_moments(gamma: float, n: int) -> KernelMoments:
    if gamma <= 0:
        raise ValueError("kernel order must be positive")
    near = np.empty(n)
    far = np.empty(n)
    # m = 1: the kernel singularity sits at sigma = 0, use the closed forms
    near[0] = 1.0 / (gamma + 1.0)
    far[0] = 1.0 / gamma - 1.0 / (gamma + 1.0)
    if n > 1:
        m = np.arange(2, n + 1, dtype=float)
        near[1:] = _cell_integrals(m, gamma - 1.0, lambda x: x)
        far[1:] = _cell_integrals(m, gamma - 1.0, lambda x: 1.0 - x)
    near.setflags(write=False)
    far.setflags(write=False)
    return KernelMoments(gamma, n, near, far)


def rl_integral_values(values: np.ndarray, gamma: float, h: float) -> np.ndarray:
    """Left fractional integral of order gamma > 0 of the interpolant, at the nodes."""
    u = np.asarray(values, dtype=float)
    n = u.size - 1
    km = kernel_moments(float(gamma), n)
    c1 = np.convolve(u, np.concatenate(([0.0], km.near)))[: n + 1]
    c2 = np.concatenate(([0.0], np.convolve(u[1:], km.far)[:n]))
    out = (h ** gamma / gamma_fn(gamma)) * (c1 + c2)
    out[0] = 0.0
    return out


def frac_int(u: GridFunction, s: float, side=Side.LEFT) -> GridFunction:
    """I^s_{a+}[u] or I^s_{b-}[u] of the piecewise-linear interpolant, at the nodes."""
    s = frac_order(s)
    side = Side.parse(side)
    h = u.grid.h
    if side is Side.LEFT:
        out = rl_integral_values(u.values, s, h)
    else:
        out = rl_integral_values(u.values[::-1], s, h)[::-1]
    return GridFunction(u.grid, out)


def reflect(u: GridFunction) -> GridFunction:
    """u composed with Q(x) = a + b - x."""
    n = u.grid.n
    return GridFunction(u.grid, u.values[::-1].copy(), u.endpoint_policy,
                        {n - j: f for j, f in u.flags.items()},
                        {n - j: m for j, m in u.cell_means.items()})


def realize(source: Source, grid: Grid) -> GridFunction:
    """Turn a function description into a grid function on ``grid``."""
    if isinstance(source, AnalyticFunction):
        if source.interval != grid.interval:
            source = AnalyticFunction(source.tag, source.params, grid.interval)
        return sample(source, grid)
    if isinstance(source, GridFunction):
        if source.grid != grid:
            raise ValueError("a fixed grid function cannot be resampled on another grid")
        return source
    return source(grid)


def _ladder_for(source: Source, ladder: Sequence[int]) -> list[int]:
    if isinstance(source, GridFunction):
        return [source.grid.n]
    return list(ladder)


def _interval_of(source: Source, interval: Interval | None) -> Interval:
    if isinstance(source, GridFunction):
        return source.grid.interval
    if isinstance(source, AnalyticFunction) and interval is None:
        return source.interval
    return interval or UNIT


# -- oracle --------------------------------------------------------------------

class OracleError(RuntimeError):
    """The adaptive quadrature did not meet its error target."""


class _Mirrored:
    """f composed with the reflection Q, with mirrored singularity metadata."""

    def __init__(self, f):
        self.f = f
        self.interval = f.interval

    def __call__(self, t):
        return self.f(self.interval.a + self.interval.b - np.asarray(t, dtype=float))

    def antiderivative(self):
        F = self.f.antiderivative()
        if F is None:
            return None
        q = self.interval.a + self.interval.b
        return lambda t: -F(q - np.asarray(t, dtype=float))

    def singularities(self):
        q = self.interval.a + self.interval.b
        return [Singularity(q - sg.point, -sg.side, sg.exponent) for sg in self.f.singularities()]


def _quad(func, lo, hi, budget):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(func, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=budget)
        except integrate.IntegrationWarning as exc:
            raise OracleError(str(exc).splitlines()[0]) from None
    return val, err


def _segment(f, lo, hi, x, s, left_sing, budget):
    """(1/Gamma(s)) int_lo^hi f(t) (x - t)^(s-1) dt with optional endpoint blow-ups."""
    kernel_at_hi = hi == x and s < 1.0
    mid = 0.5 * (lo + hi) if (left_sing is not None or kernel_at_hi) else hi
    total = err = 0.0
    # left piece [lo, mid]
    if left_sing is not None:
        e = left_sing.exponent
        L = mid - lo
        if e is None:
            # logarithmic blow-up: peel off k(lo) * int f exactly via the primitive,
            # the remainder f(t) (k(t) - k(lo)) is bounded
            F = f.antiderivative()
            if F is None:
                raise OracleError("logarithmic singularity without a closed-form primitive")
            k_lo = (x - lo) ** (s - 1.0)
            v, r = _quad(lambda t: f(t) * ((x - t) ** (s - 1.0) - k_lo), lo, mid, budget)
            v += k_lo * float(F(mid) - F(lo))
        else:
            q = 1.0 / (1.0 + e)

            def g(sig):
                t = lo + sig ** q
                return f(t) * (x - t) ** (s - 1.0) * q * sig ** (q - 1.0)
            v, r = _quad(g, 0.0, L ** (1.0 + e), budget)
        total += v
        err += r
    elif mid > lo:
        v, r = _quad(lambda t: f(t) * (x - t) ** (s - 1.0), lo, mid, budget)
        total += v
        err += r
    total /= gamma_fn(s)
    err /= gamma_fn(s)
    # right piece [mid, hi] when the kernel is singular at hi: t = x - tau^(1/s)
    if kernel_at_hi:
        inv = 1.0 / s
        v, r = _quad(lambda tau: f(x - tau ** inv), 0.0, (x - mid) ** s, budget)
        total += v / gamma_fn(s + 1.0)
        err += r / gamma_fn(s + 1.0)
    elif mid < hi:
        v, r = _quad(lambda t: f(t) * (x - t) ** (s - 1.0), mid, hi, budget)
        total += v / gamma_fn(s)
        err += r / gamma_fn(s)
    return total, err


def frac_int_oracle(f: AnalyticFunction, s: float, side=Side.LEFT, x: float = 0.5,
                    tol: float = 1e-9, budget: int = 200) -> float:
    """Reference value of I^s[f](x) by adaptive quadrature.

    The kernel singularity at t = x is removed with t = x - tau^(1/s); an
    algebraic blow-up of f at a segment start c uses t = c + sigma^(1/(1+e)),
    a logarithmic one t = c + L e^(-z).  Raises OracleError when the quadrature
    error estimate exceeds ``tol``.
    """
    side = Side.parse(side)
    iv = f.interval
    if not iv.a < x < iv.b:
        raise ValueError("oracle point must lie inside (a, b)")
    if s <= 0:
        raise ValueError("order must be positive")
    if side is Side.RIGHT:
        return frac_int_oracle(_Mirrored(f), s, Side.LEFT, iv.a + iv.b - x, tol, budget)
    sings = f.singularities()
    cuts = sorted({iv.a, x, *(sg.point for sg in sings if iv.a < sg.point < x)})
    total = err = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        left = next((sg for sg in sings if sg.point == lo and sg.side > 0), None)
        v, r = _segment(f, lo, hi, x, s, left, budget)
        total += v
        err += r
    if err > tol:
        raise OracleError(f"error estimate {err:.2e} exceeds target {tol:.0e}")
    return total


# -- identity checks -------------------------------------------------------------

def _timed(report_fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = report_fn(*args, **kwargs)
        rep.wall_time = time.perf_counter() - t0
        return rep
    wrapper.__name__ = report_fn.__name__
    wrapper.__doc__ = report_fn.__doc__
    return wrapper


def _label(source: Source) -> str:
    return source.label if isinstance(source, AnalyticFunction) else getattr(source, "label", "grid-function")


@_timed
def check_semigroup(u: Source, alpha: float, beta: float, ladder=DEFAULT_LADDER,
                    interval: Interval | None = None) -> VerificationReport:
    """L1 gap between I^alpha[I^beta[u]] and I^(alpha+beta)[u] on a ladder."""
    alpha, beta = frac_order(alpha), frac_order(beta)
    iv = _interval_of(u, interval)
    sizes = _ladder_for(u, ladder)
    errs, norm = [], 0.0
    for n in sizes:
        g = Grid(iv, n)
        uu = realize(u, g)
        lhs = frac_int(frac_int(uu, beta), alpha)
        rhs = GridFunction(g, rl_integral_values(uu.values, alpha + beta, g.h))
        errs.append(lp_norm(lhs - rhs, 1))
        norm = lp_norm(uu, 1)
    return VerificationReport(
        "semigroup", {"fn": _label(u), "alpha": alpha, "beta": beta}, sizes, errs,
        fit_rate(sizes, errs), ladder_verdict(errs, 1e-3 * norm), details={"u_l1": norm})


@_timed
def check_reflection(u: Source, s: float, ladder=DEFAULT_LADDER,
                     interval: Interval | None = None) -> VerificationReport:
    """Nodewise I^s_{a+}[u](Q x) = I^s_{b-}[u o Q](x)."""
    s = frac_order(s)
    iv = _interval_of(u, interval)
    sizes = _ladder_for(u, ladder)
    errs = []
    for n in sizes:
        uu = realize(u, Grid(iv, n))
        lhs = frac_int(uu, s, Side.LEFT).values[::-1]
        rhs = frac_int(reflect(uu), s, Side.RIGHT).values
        errs.append(float(np.max(np.abs(lhs - rhs))))
    ok = max(errs) <= 1e-10
    return VerificationReport("reflection", {"fn": _label(u), "s": s}, sizes, errs, None,
                              Verdict.PASS if ok else Verdict.FAIL)


def pair(u: GridFunction, v: GridFunction) -> float:
    """Trapezoidal pairing of two grid functions."""
    w = u.grid.trapezoid_weights()
    return float(np.dot(w, u.quadrature_values() * v.quadrature_values()))


@_timed
def check_duality(u: Source, v: Source, s: float, ladder=DEFAULT_LADDER,
                  interval: Interval | None = None) -> VerificationReport:
    """int I^s_{a+}[u] v = int u I^s_{b-}[v], both by the trapezoidal rule."""
    s = frac_order(s)
    iv = _interval_of(u, interval)
    sizes = _ladder_for(u, ladder)
    gaps, lhs_vals = [], []
    for n in sizes:
        g = Grid(iv, n)
        uu, vv = realize(u, g), realize(v, g)
        lhs = pair(frac_int(uu, s, Side.LEFT), vv)
        rhs = pair(uu, frac_int(vv, s, Side.RIGHT))
        gaps.append(abs(lhs - rhs))
        lhs_vals.append(lhs)
    verdict = ladder_verdict(gaps, 1e-3 * (1.0 + abs(lhs_vals[-1])))
    return VerificationReport("duality", {"u": _label(u), "v": _label(v), "s": s}, sizes, gaps,
                              fit_rate(sizes, gaps), verdict, details={"lhs": lhs_vals})


@_timed
def sweep_s_to_0(u: Source, s_list: Sequence[float], n: int = 4096,
                 interval: Interval | None = None) -> VerificationReport:
    """L1 distance between I^s[u] and u as s decreases toward 0."""
    s_vals = [frac_order(s) for s in s_list]
    if any(b >= a for a, b in zip(s_vals, s_vals[1:])):
        raise ValueError("s_list must be strictly decreasing")
    iv = _interval_of(u, interval)
    g = Grid(iv, n) if not isinstance(u, GridFunction) else u.grid
    uu = realize(u, g)
    images = [frac_int(uu, s) for s in s_vals]
    gaps = [lp_norm(v - uu, 1) for v in images]
    norm = lp_norm(uu, 1)
    rows = [{"s": s, "value": lp_norm(v, 1), "target": norm, "gap": e} for s, v, e in zip(s_vals, images, gaps)]
    ok = is_decreasing(gaps) and gaps[-1] <= 5e-2 * norm
    return VerificationReport("s-to-0", {"fn": _label(u), "n": g.n, "s_list": s_vals},
                              [g.n] * len(s_vals), gaps, None,
                              Verdict.PASS if ok else Verdict.FAIL, details={"u_l1": norm, "rows": rows})
