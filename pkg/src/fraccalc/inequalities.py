"""Closed-form identities, operator bounds and embedding inequalities."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .corpus import AnalyticFunction, parse_function, sample
from .derivative import DerivKind, frac_deriv, higher_frac_int
from .grid import Grid, GridFunction, Interval, UNIT, frac_order
from .integral import Side, _timed, frac_int, frac_int_oracle, realize
from .norms import (gagliardo_seminorm, hardy_quotient, holder_seminorm, lp_norm,
                    weak_lp_quasinorm)
from .report import (DEFAULT_LADDER, VerificationReport, Verdict, diverges, fit_rate,
                     is_decreasing, ladder_verdict)
from .special import gamma_fn

__all__ = [
    "check_critical_power",
    "check_power_rule",
    "check_l1_bound",
    "check_linf_bound",
    "check_sobolev_action",
    "check_higher_order",
    "check_hardy",
    "check_weak_lp_embedding",
    "check_embedding_catalogue",
    "check_weak_type",
    "random_grid_function",
]


def random_grid_function(grid: Grid, seed: int) -> GridFunction:
    rng = np.random.default_rng(seed)
    return GridFunction(grid, rng.standard_normal(grid.n + 1))


@_timed
def check_critical_power(s: float, ladder=DEFAULT_LADDER) -> VerificationReport:
    """I^(1-s)[CriticalPower(s)] = 1 in L1, and ||D^s CriticalPower(s)||_{L1(h,1)} small."""
    s = frac_order(s)
    f = AnalyticFunction.make("critical-power", s)
    int_err, der = [], []
    for n in ladder:
        g = Grid(UNIT, n)
        u = sample(f, g)
        int_err.append(lp_norm(frac_int(u, 1.0 - s) - GridFunction(g, np.ones(n + 1)), 1))
        der.append(lp_norm(frac_deriv(u, s, DerivKind.RL), 1, g.h, g.b))
    ok_int = is_decreasing(int_err) and int_err[-1] <= 1e-2
    ok_der = der[-1] <= 1e-2
    return VerificationReport("critical-power", {"s": s}, list(ladder), int_err, fit_rate(ladder, int_err),
                              Verdict.PASS if ok_int and ok_der else Verdict.FAIL,
                              details={"integral_l1_error": int_err, "derivative_l1_on_(h,1)": der,
                                       "integral_ok": ok_int, "derivative_ok": ok_der})


@_timed
def check_power_rule(mu: float, s: float, n: int = 2048,
                     points: Sequence[float] = (0.1, 0.25, 0.5, 0.75, 0.9)) -> VerificationReport:
    """I^s[(x-a)^(mu-1)] = Gamma(mu)/Gamma(mu+s) (x-a)^(mu+s-1), oracle and grid scheme."""
    s = frac_order(s)
    f = AnalyticFunction.make("power", mu)
    c = gamma_fn(mu) / gamma_fn(mu + s)
    oracle_err = max(abs(frac_int_oracle(f, s, Side.LEFT, x) - c * x ** (mu + s - 1.0)) for x in points)
    g = Grid(UNIT, n)
    approx = frac_int(sample(f, g), s).values
    exact = c * g.nodes ** (mu + s - 1.0)
    exact[0] = 0.0
    rel = float(np.max(np.abs(approx - exact)) / np.max(np.abs(exact)))
    ok = oracle_err <= 1e-9 and rel <= 1e-3
    return VerificationReport("power-rule", {"mu": mu, "s": s}, [n], [rel], None,
                              Verdict.PASS if ok else Verdict.FAIL,
                              details={"oracle_abs_error": oracle_err, "grid_relative_error": rel})


def _default_bound_corpus() -> list[AnalyticFunction]:
    specs = ["constant:1", "linear", "cosine", "sine", "power:0.5", "power:2", "critical-power:0.3",
             "critical-power:0.7", "shifted-critical:0.25:0.75:0.5", "indicator:0.25:0.75",
             "log-left:1.5", "log-right:0.5", "cantor:4", "power-cosine:2"]
    return [parse_function(t) for t in specs]


@_timed
def check_l1_bound(s_values=tuple(round(0.1 * k, 1) for k in range(1, 10)), n: int = 1024,
                   seeds=range(20), corpus=None) -> VerificationReport:
    """||I^s u||_1 <= (b-a)^s/Gamma(s+1) ||u||_1 (+1e-8) for random and corpus data, both sides."""
    g = Grid(UNIT, n)
    members = [(f.label, sample(f, g)) for f in (corpus or _default_bound_corpus())]
    members += [(f"random:{k}", random_grid_function(g, k)) for k in seeds]
    worst, violations = 0.0, []
    for s in s_values:
        C = g.interval.length ** s / gamma_fn(s + 1.0)
        for label, u in members:
            rhs = C * lp_norm(u, 1)
            for side in (Side.LEFT, Side.RIGHT):
                lhs = lp_norm(frac_int(u, s, side), 1)
                worst = max(worst, lhs / rhs if rhs else 0.0)
                if lhs > rhs + 1e-8:
                    violations.append({"fn": label, "s": s, "side": side.value, "lhs": lhs, "rhs": rhs})
    return VerificationReport("l1-bound", {"n": n, "s_values": list(s_values), "members": len(members)},
                              [n], [worst], None, Verdict.PASS if not violations else Verdict.FAIL,
                              details={"max_ratio": worst, "violations": violations})


@_timed
def check_linf_bound(s_values=(0.1, 0.3, 0.5, 0.7, 0.9), n: int = 1024, seeds=range(20)) -> VerificationReport:
    g = Grid(UNIT, n)
    worst = 0.0
    bad = []
    for s in s_values:
        C = g.interval.length ** s / gamma_fn(s + 1.0)
        for k in seeds:
            u = random_grid_function(g, k)
            ratio = lp_norm(frac_int(u, s), math.inf) / (C * lp_norm(u, math.inf))
            worst = max(worst, ratio)
            if ratio > 1.0 + 1e-12:
                bad.append({"seed": k, "s": s, "ratio": ratio})
    return VerificationReport("linf-bound", {"n": n}, [n], [worst], None,
                              Verdict.PASS if not bad else Verdict.FAIL, details={"violations": bad})


def _w1p(u: GridFunction, du: GridFunction, p: float) -> float:
    return lp_norm(u, p) + lp_norm(du, p)


@_timed
def check_sobolev_action(f: AnalyticFunction, s: float, p: float, n: int = 4096) -> VerificationReport:
    """||I^(1-s) u||_{W^{1,p}} against the explicit constants.

    With u(a) = 0 the constant is (b-a)^(1-s)/Gamma(2-s); otherwise (sp < 1)
    (b-a)^(1-s)/Gamma(1-s) (1/(1-s) + max{1, 1/(b-a)} (1-sp)^(-1/p)).
    """
    s = frac_order(s)
    g = Grid(f.interval, n)
    u = sample(f, g)
    du = GridFunction(g, np.asarray(f.derivative(1)(g.nodes), dtype=float) * np.ones(n + 1))
    L = g.interval.length
    v = frac_int(u, 1.0 - s)
    dv = frac_deriv(u, s, DerivKind.RL)
    lhs = _w1p(v, dv, p)
    rhs_norm = _w1p(u, du, p)
    if abs(u.values[0]) <= 1e-14:
        C = L ** (1.0 - s) / gamma_fn(2.0 - s)
        which = "vanishing-trace"
    else:
        if s * p >= 1:
            raise ValueError("the general constant needs s p < 1")
        C = L ** (1.0 - s) / gamma_fn(1.0 - s) * (1.0 / (1.0 - s) + max(1.0, 1.0 / L) / (1.0 - s * p) ** (1.0 / p))
        which = "general"
    ok = lhs <= C * rhs_norm
    return VerificationReport("sobolev-action", {"fn": f.label, "s": s, "p": p, "constant": which}, [n],
                              [lhs / (C * rhs_norm)], None, Verdict.PASS if ok else Verdict.FAIL,
                              details={"lhs": lhs, "bound": C * rhs_norm, "C": C})


@_timed
def check_higher_order(f: AnalyticFunction | None = None, k: int = 2, s: float = 1.5,
                       ladder=DEFAULT_LADDER) -> VerificationReport:
    """Second difference of the j = 0 output against the j = 2 output (and first against j = 1).

    Errors are L1 over interior nodes; the j = 2 output behaves like (x-a)^(2k-s-2)
    near a, so the nodewise maximum only converges at a fractional rate.
    """
    f = f or AnalyticFunction.make("power", 3.0)
    errs, errs1 = [], []
    for n in ladder:
        g = Grid(f.interval, n)
        h = g.h
        u0 = higher_frac_int(f, g, k, s, 0).values
        u1 = higher_frac_int(f, g, k, s, 1).values
        u2 = higher_frac_int(f, g, k, s, 2).values
        d2 = (u0[2:] - 2 * u0[1:-1] + u0[:-2]) / h ** 2
        d1 = (u0[2:] - u0[:-2]) / (2 * h)
        errs.append(float(h * np.sum(np.abs(d2 - u2[1:-1]))))
        errs1.append(float(h * np.sum(np.abs(d1 - u1[1:-1]))))
    rate = fit_rate(ladder, errs)
    ok = is_decreasing(errs) and rate is not None and rate >= 0.9 and is_decreasing(errs1)
    return VerificationReport("higher-order", {"fn": f.label, "k": k, "s": s}, list(ladder), errs, rate,
                              Verdict.PASS if ok else Verdict.FAIL, details={"first_derivative_errors": errs1})


@_timed
def check_hardy(s: float = 0.4, p: float = 1.0, ladder=DEFAULT_LADDER, members=None) -> VerificationReport:
    """Calibrate c in int |u|^p/dist^(sp) <= c (||u||_p^p + [u]_{W^{s,p}}^p) and check it is stable."""
    s = frac_order(s)
    members = members or [lambda g: GridFunction(g, np.maximum(0.0, 1 - np.abs(g.nodes - 0.5) / 0.5)),
                          lambda g: GridFunction(g, np.sin(np.pi * g.nodes)),
                          lambda g: GridFunction(g, (g.nodes * (1 - g.nodes)) ** 2 * 16)]
    ratios = []
    for n in ladder:
        g = Grid(UNIT, n)
        r = 0.0
        for m in members:
            u = realize(m, g)
            num = hardy_quotient(u, s, p)
            den = lp_norm(u, p) ** p + gagliardo_seminorm(u, s, p).value ** p
            r = max(r, num / den)
        ratios.append(r)
    stable = not diverges(ratios, 1.05) and all(math.isfinite(r) for r in ratios)
    return VerificationReport("hardy", {"s": s, "p": p}, list(ladder), ratios, None,
                              Verdict.PASS if stable else Verdict.FAIL,
                              details={"calibrated_constant": max(ratios)})


@_timed
def check_weak_lp_embedding(n: int = 4096, slack: float = 1e-2) -> VerificationReport:
    """weak_p <= L^p, and ||u||_r <= (p/(p-r))^(1/r) L^(1/r-1/p) weak_p for r < p."""
    g = Grid(UNIT, n)
    members = [sample(parse_function(t), g) for t in
               ("constant:2", "linear", "cosine", "critical-power:0.5", "critical-power:0.7", "power:0.6")]
    cases = []
    ok = True
    for u in members:
        for s in (0.3, 0.5):
            for p in (1.0, 2.0, 1.0 / (1.0 - s)):
                w = weak_lp_quasinorm(u, p)
                strong = lp_norm(u, p)
                ok &= w <= strong * (1.0 + 1e-12)
                for r in (1.0, 0.5 * (1.0 + p)):
                    if not (1.0 <= r < p):
                        continue
                    C = (p / (p - r)) ** (1.0 / r) * g.interval.length ** (1.0 / r - 1.0 / p)
                    lr = lp_norm(u, r)
                    ok &= lr <= C * w * (1.0 + slack)
                    cases.append({"p": p, "r": r, "lr": lr, "bound": C * w})
    return VerificationReport("weak-lp-embedding", {"n": n}, [n], [max(c["lr"] / c["bound"] for c in cases)],
                              None, Verdict.PASS if ok else Verdict.FAIL)


@_timed
def check_embedding_catalogue(s: float = 0.4, ladder=DEFAULT_LADDER) -> VerificationReport:
    """Norms of I^s u stay bounded under refinement in each continuity regime.

    Data: u = (x-a)^(-1/(2p)) / ||.||_p, which lies in L^p (bounded for p = inf).
    """
    s = frac_order(s)
    regimes = []
    r_weak = 0.5 * (1.0 + 1.0 / (1.0 - s))
    p3 = 0.5 * (1.0 + 1.0 / s)
    p4 = 2.0 / s
    regimes.append(("L1->Lr", 1.0, ("lp", r_weak)))
    regimes.append(("Lp->Lr", p3, ("lp", p3 / (1.0 - s * p3))))
    regimes.append(("Lp->Holder", p4, ("holder", s - 1.0 / p4)))
    regimes.append(("L1/s->Lr", 1.0 / s, ("lp", 10.0)))
    regimes.append(("Linf->Holder", math.inf, ("holder", s)))
    table, ok = {}, True
    for name, p, (kind, q) in regimes:
        vals = []
        for n in ladder:
            g = Grid(UNIT, n)
            if p == math.inf:
                u = GridFunction(g, np.ones(n + 1))
            else:
                e = -1.0 / (2.0 * p)
                f = AnalyticFunction.make("power", 1.0 + e)
                u = sample(f, g) * (1.0 / (1.0 / (e * p + 1.0)) ** (1.0 / p))
            v = frac_int(u, s)
            vals.append(lp_norm(v, q) if kind == "lp" else holder_seminorm(v, q))
        table[name] = vals
        ok &= not diverges(vals, 1.05) and vals[-1] <= 1.2 * vals[0]
    worst = [max(v[i] for v in table.values()) for i in range(len(ladder))]
    return VerificationReport("embedding-catalogue", {"s": s}, list(ladder), worst, None,
                              Verdict.PASS if ok else Verdict.FAIL, details=table)


@_timed
def check_weak_type(s: float = 0.5, s0: float = 0.4, ladder=DEFAULT_LADDER) -> VerificationReport:
    """Weak-L^(1/(1-s)) quasinorm of I^s[CriticalPower(s0)] stays bounded under refinement."""
    s = frac_order(s)
    p = 1.0 / (1.0 - s)
    f = AnalyticFunction.make("critical-power", s0)
    weak, strong = [], []
    for n in ladder:
        v = frac_int(sample(f, Grid(UNIT, n)), s)
        weak.append(weak_lp_quasinorm(v, p))
        strong.append(lp_norm(v, p))
    bounded = not diverges(weak, 1.05) and weak[-1] <= 1.2 * weak[0]
    return VerificationReport("weak-type", {"s": s, "s0": s0}, list(ladder), weak, None,
                              Verdict.PASS if bounded else Verdict.FAIL, details={"strong_norm": strong})
