"""Divergence probes: quantities that are infinite in the continuum.

Each probe evaluates a finite discrete surrogate on a ladder of grids and
certifies divergence by sustained growth.  Quantities growing like log(1/h)
need coarse refinement factors (16x per step) to clear a fixed growth ratio,
so each probe carries its own default ladder.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .corpus import AnalyticFunction, parse_function, sample
from .derivative import DerivKind, frac_deriv
from .grid import Grid, GridFunction, UNIT, frac_order
from .integral import Side, _timed, frac_int
from .norms import gagliardo_seminorm, lp_norm
from .report import VerificationReport, Verdict, diverges
from .special import gamma_fn

__all__ = ["PROBES", "run_probe", "probe_csv"]

LOG_LADDER = (64, 1024, 16384)
SUP_LADDER = (256, 1024, 4096, 16384)


def _growth_report(name, params, sizes, values, factor, details=None) -> VerificationReport:
    ok = diverges(values, factor)
    ratios = [b / a if a else math.inf for a, b in zip(values, values[1:])]
    return VerificationReport(name, params, list(sizes), list(values), None,
                              Verdict.DIVERGES if ok else Verdict.FAIL,
                              details={"growth_ratios": ratios, "required_ratio": factor, **(details or {})})


def _check_factor(sizes: Sequence[int], factor: int) -> None:
    if any(b != factor * a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"this probe needs a ladder refined {factor}x per level")


@_timed
def probe_gagliardo_critical(s: float = 0.5, ladder=LOG_LADDER, p: float = 1.0) -> VerificationReport:
    """[CriticalPower(s)]_{W^{s,1}} grows without bound."""
    s = frac_order(s)
    f = AnalyticFunction.make("critical-power", s)
    vals = [gagliardo_seminorm(sample(f, Grid(UNIT, n)), s, p).value for n in ladder]
    return _growth_report("gagliardo-critical", {"s": s, "p": p}, ladder, vals, 1.2)


@_timed
def probe_emb_p1_sharp(s: float = 0.1, beta: float = 1.05, ladder=(16, 256, 4096, 65536)) -> VerificationReport:
    """||I^s[LogKernelLeft(beta)]||_{1/(1-s)} grows while the datum stays in L1."""
    s = frac_order(s)
    if not 1.0 < beta <= 2.0 - s:
        raise ValueError("need 1 < beta <= 2 - s")
    f = AnalyticFunction.make("log-left", beta)
    vals, l1 = [], []
    for n in ladder:
        u = sample(f, Grid(UNIT, n))
        vals.append(lp_norm(frac_int(u, s), 1.0 / (1.0 - s)))
        l1.append(lp_norm(u, 1))
    return _growth_report("emb-p1-sharp", {"s": s, "beta": beta}, ladder, vals, 1.2,
                          {"datum_l1": l1, "datum_l1_exact": math.log(2.0) ** (1.0 - beta) / (beta - 1.0)})


@_timed
def probe_emb_p1s_sharp(s: float = 0.5, ladder=SUP_LADDER) -> VerificationReport:
    """sup of I^s[LogKernelRight(s)] (attained near b) grows without bound."""
    s = frac_order(s)
    _check_factor(ladder, 4)
    f = AnalyticFunction.make("log-right", s)
    vals = [lp_norm(frac_int(sample(f, Grid(UNIT, n)), s), math.inf) for n in ladder]
    return _growth_report("emb-p1s-sharp", {"s": s}, ladder, vals, 1.5)


@_timed
def probe_cos_linfty(s: float = 0.3, ladder=SUP_LADDER) -> VerificationReport:
    """Nodal max of D^s[cos] on (0, 1) grows like h^(-s)."""
    s = frac_order(s)
    _check_factor(ladder, 4)
    f = AnalyticFunction.make("cosine")
    vals, lower = [], []
    for n in ladder:
        g = Grid(UNIT, n)
        vals.append(lp_norm(frac_deriv(sample(f, g), s, DerivKind.RL), math.inf))
        lower.append(g.h ** (-s) / gamma_fn(1.0 - s) - 1.0 / (1.0 - s))
    rep = _growth_report("cos-linfty", {"s": s}, ladder, vals, 1.5, {"lower_bound": lower})
    if any(v < lb for v, lb in zip(vals, lower)):
        rep.verdict = Verdict.FAIL
    return rep


@_timed
def probe_left_right(s: float = 0.5, ladder=LOG_LADDER, delta: float = 0.05) -> VerificationReport:
    """Right RL derivative of x^(s-1)/Gamma(s) against 1/(Gamma(1-s)Gamma(s) x (1-x)^s)."""
    s = frac_order(s)
    f = AnalyticFunction.make("critical-power", s)
    c = 1.0 / (gamma_fn(1.0 - s) * gamma_fn(s))
    match, totals = [], []
    for n in ladder:
        g = Grid(UNIT, n)
        d = frac_deriv(sample(f, g), s, DerivKind.RL, Side.RIGHT)
        x = g.nodes
        exact = np.zeros(n + 1)
        exact[1:-1] = c / (x[1:-1] * (1.0 - x[1:-1]) ** s)
        match.append(lp_norm(d - GridFunction(g, exact), 1, delta, 1.0 - delta))
        totals.append(lp_norm(d, 1))
    ok = match[-1] <= 1e-2 and diverges(totals, 1.2)
    return VerificationReport("left-right", {"s": s, "delta": delta}, list(ladder), match, None,
                              Verdict.DIVERGES if ok else Verdict.FAIL,
                              details={"interior_l1_error": match, "l1_norm_on_I": totals,
                                       "l1_diverges": diverges(totals, 1.2)})


PROBES = {
    "gagliardo-critical": probe_gagliardo_critical,
    "emb-p1-sharp": probe_emb_p1_sharp,
    "emb-p1s-sharp": probe_emb_p1s_sharp,
    "cos-linfty": probe_cos_linfty,
    "left-right": probe_left_right,
}


def run_probe(case: str, **kwargs) -> VerificationReport:
    if case not in PROBES:
        raise KeyError(case)
    return PROBES[case](**kwargs)


def probe_csv(report: VerificationReport) -> str:
    lines = ["n,value"]
    vals = report.details.get("l1_norm_on_I", report.errors)
    for n, v in zip(report.grid_sizes, vals):
        lines.append(f"{n},{v:.17g}")
    return "\n".join(lines) + "\n"
