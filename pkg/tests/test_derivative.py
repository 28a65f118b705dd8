import math

import numpy as np
import pytest

from fraccalc.corpus import AnalyticFunction, parse_function, sample
from fraccalc.derivative import (DerivKind, check_caputo_duality, check_ftc, check_marchaud_equiv,
                                 check_representability, estimate_trace, frac_deriv, higher_frac_int,
                                 higher_order_constant)
from fraccalc.grid import Grid, GridFunction, UNIT
from fraccalc.integral import Side
from fraccalc.report import Verdict
from fraccalc.special import gamma_fn


@pytest.fixture
def g():
    return Grid(UNIT, 1024)


def test_rl_of_constant(g):
    d = frac_deriv(GridFunction(g, np.ones(g.n + 1)), 0.4, DerivKind.RL)
    x = g.nodes[1:]
    assert np.allclose(d.values[1:], x ** -0.4 / gamma_fn(0.6), rtol=1e-10)
    assert d.flags.get(0) == "singular"


def test_caputo_kills_constants_and_maps_linear(g):
    one = GridFunction(g, np.ones(g.n + 1))
    assert np.max(np.abs(frac_deriv(one, 0.4, DerivKind.CAPUTO).values)) < 1e-13
    lin = GridFunction(g, g.nodes)
    d = frac_deriv(lin, 0.4, DerivKind.CAPUTO)
    assert np.allclose(d.values, g.nodes ** 0.6 / gamma_fn(1.6), atol=1e-12)


def test_rl_equals_caputo_plus_boundary_term(g):
    u = sample(parse_function("cosine"), g)
    s = 0.7
    rl = frac_deriv(u, s, DerivKind.RL).values[1:]
    cap = frac_deriv(u, s, DerivKind.CAPUTO).values[1:]
    assert np.allclose(rl, cap + np.cos(0.0) * g.nodes[1:] ** -s / gamma_fn(1 - s), rtol=1e-12, atol=1e-12)


def test_marchaud_matches_rl(g):
    u = sample(parse_function("sine"), g)
    rl = frac_deriv(u, 0.3, DerivKind.RL)
    ma = frac_deriv(u, 0.3, DerivKind.MARCHAUD)
    assert np.max(np.abs(rl.values[1:] - ma.values[1:])) < 1e-10
    assert check_marchaud_equiv(parse_function("cosine"), 0.5).verdict is Verdict.PASS


def test_right_derivative_mirrors_left(g):
    u = sample(parse_function("power-cosine:2"), g)
    right = frac_deriv(u, 0.5, DerivKind.CAPUTO, Side.RIGHT).values
    mirrored = frac_deriv(GridFunction(g, u.values[::-1]), 0.5, DerivKind.CAPUTO, Side.LEFT).values[::-1]
    assert np.allclose(right, mirrored, atol=1e-13)


def test_trace_estimates():
    g = Grid(UNIT, 4096)
    assert estimate_trace(sample(parse_function("cosine"), g), 0.5) == pytest.approx(0.0, abs=1e-2)
    assert estimate_trace(sample(parse_function("critical-power:0.5"), g), 0.5) == pytest.approx(1.0, abs=1e-2)


def test_ftc_on_smooth_data():
    rep = check_ftc(parse_function("cosine"), 0.5)
    assert rep.verdict is Verdict.PASS
    assert rep.details["residual_iii"] != "not-applicable"


def test_ftc_critical_power_marks_residual_iii():
    rep = check_ftc(parse_function("critical-power:0.5"), 0.5)
    assert rep.details["residual_iii"] == "not-applicable"
    assert rep.details["trace"][-1] == pytest.approx(1.0, abs=1e-2)
    # residual (i) halves with each 4x refinement
    r1 = rep.details["residual_i"]
    assert r1[0] > r1[1] > r1[2]


def test_caputo_duality():
    bubble = lambda grid: GridFunction(grid, 4 * grid.nodes * (1 - grid.nodes))  # noqa: E731
    assert check_caputo_duality(parse_function("cosine"), bubble, 0.4).verdict is Verdict.PASS
    with pytest.raises(ValueError):
        check_caputo_duality(parse_function("cosine"), parse_function("cosine"), 0.4)


def test_representability_classification():
    g_of = lambda grid: GridFunction(grid, 1.0 - np.cos(grid.nodes))  # noqa: E731
    rep = check_representability(g_of, 0.5)
    assert rep.details["representable"] and rep.verdict is Verdict.PASS
    rep = check_representability(parse_function("critical-power:0.5"), 0.5)
    assert not rep.details["representable"]


def test_higher_order_constants():
    assert higher_order_constant(2, 2, 1.5) == pytest.approx(1.0)
    assert higher_order_constant(0, 2, 1.5) == pytest.approx(1 / (0.5 * 1.5))
    assert higher_order_constant(1, 3, 2.5) == pytest.approx(2.5 / (0.5 * 1.5 * 2.5))


def test_higher_order_example():
    g = Grid(UNIT, 512)
    f = AnalyticFunction.make("power", 3.0)  # (x - a)^2
    out = higher_frac_int(f, g, 2, 1.5, 2)
    assert np.allclose(out.values, 2 * g.nodes ** 0.5 / gamma_fn(1.5), atol=1e-10)
    with pytest.raises(ValueError):
        higher_frac_int(parse_function("cosine"), g, 2, 1.5, 0)


def test_order_validation(g):
    u = GridFunction.zeros(g)
    with pytest.raises(ValueError):
        frac_deriv(u, 1.2)
    with pytest.raises(ValueError):
        DerivKind.parse("grunwald")
