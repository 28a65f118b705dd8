import math

import mpmath
import numpy as np
import pytest

from fraccalc.corpus import AnalyticFunction, parse_function, sample
from fraccalc.grid import Grid, GridFunction, Interval, UNIT
from fraccalc.integral import (OracleError, Side, check_duality, check_reflection, check_semigroup,
                               frac_int, frac_int_oracle, kernel_moments, pair, reflect, sweep_s_to_0)
from fraccalc.report import Verdict
from fraccalc.special import gamma_fn


def test_constant_matches_closed_form():
    g = Grid(UNIT, 1024)
    v = frac_int(GridFunction(g, np.ones(g.n + 1)), 0.5)
    assert np.max(np.abs(v.values - 2 * np.sqrt(g.nodes / math.pi))) < 1e-12


@pytest.mark.parametrize("mu,s", [(1.0, 0.5), (2.0, 0.3), (1.5, 0.7), (3.0, 0.9)])
def test_oracle_power_rule(mu, s):
    f = AnalyticFunction.make("power", mu)
    for x in (0.1, 0.5, 0.9):
        exact = gamma_fn(mu) / gamma_fn(mu + s) * x ** (mu + s - 1)
        assert frac_int_oracle(f, s, Side.LEFT, x) == pytest.approx(exact, abs=1e-10)


def test_oracle_critical_power_beta_identity():
    for s0 in (0.25, 0.5, 0.75):
        f = AnalyticFunction.make("critical-power", s0)
        assert frac_int_oracle(f, 1 - s0, Side.LEFT, 0.37) == pytest.approx(1.0, abs=1e-10)


def _mp_left_log_left(beta, s, x):
    # t = exp(-y): the kernel mass sits at t far below the smallest double
    y0 = -mpmath.log(x)
    g = lambda y: (x - mpmath.exp(-y)) ** (s - 1) * y ** (-beta)  # noqa: E731
    return mpmath.quad(g, [y0, y0 + 1, 10, 100, 1000, mpmath.inf]) / mpmath.gamma(s)


def _mp_right_log_right(s0, s, x):
    # 1 - t = exp(-y)
    y0 = mpmath.log(2) if x < 0.5 else -mpmath.log(1 - x)
    g = lambda y: ((1 - x) - mpmath.exp(-y)) ** (s - 1) * mpmath.exp(-(1 - s0) * y) / y  # noqa: E731
    return mpmath.quad(g, [y0, y0 + 1, 10, 100, mpmath.inf]) / mpmath.gamma(s)


@pytest.mark.parametrize("x", [0.05, 0.2, 0.45])
def test_oracle_log_left_against_mpmath(x):
    mpmath.mp.dps = 30
    ref = float(_mp_left_log_left(1.5, 0.4, mpmath.mpf(x)))
    assert frac_int_oracle(parse_function("log-left:1.5"), 0.4, Side.LEFT, x) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("x", [0.6, 0.9, 0.99])
def test_oracle_log_right_against_mpmath(x):
    mpmath.mp.dps = 30
    ref = float(mpmath.re(_mp_right_log_right(0.5, 0.5, mpmath.mpf(x))))
    assert frac_int_oracle(parse_function("log-right:0.5"), 0.5, Side.RIGHT, x) == pytest.approx(ref, rel=1e-8)


def test_oracle_rejects_bad_points():
    with pytest.raises(ValueError):
        frac_int_oracle(parse_function("cosine"), 0.5, Side.LEFT, 1.0)
    with pytest.raises(OracleError):
        frac_int_oracle(parse_function("cosine"), 0.5, Side.LEFT, 0.5, tol=1e-30)


def test_grid_scheme_matches_oracle_on_smooth_data():
    f = parse_function("cosine")
    g = Grid(UNIT, 512)
    v = frac_int(sample(f, g), 0.3)
    for j in (64, 256, 500):
        assert v.values[j] == pytest.approx(frac_int_oracle(f, 0.3, Side.LEFT, g.nodes[j]), abs=1e-6)


def test_second_order_convergence_for_smooth_data():
    f = parse_function("cosine")
    errs = []
    for n in (64, 128, 256, 512):
        g = Grid(UNIT, n)
        v = frac_int(sample(f, g), 0.5)
        errs.append(abs(v.values[n // 2] - frac_int_oracle(f, 0.5, Side.LEFT, 0.5)))
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(rates) > 1.8


def test_right_integral_mirrors_left():
    g = Grid(Interval(1.0, 3.0), 200)
    u = GridFunction(g, np.exp(-g.nodes) * np.sin(3 * g.nodes))
    left_of_reflected = frac_int(reflect(u), 0.4, Side.LEFT).values[::-1]
    assert np.allclose(frac_int(u, 0.4, Side.RIGHT).values, left_of_reflected, atol=1e-14)


def test_kernel_moments_sum_to_cell_integral():
    km = kernel_moments(0.6, 8)
    # near + far over cell m integrates (m-1+sigma)^(gamma-1) over [0, 1]
    m = np.arange(1, 9)
    exact = (m ** 0.6 - (m - 1) ** 0.6) / 0.6
    assert np.allclose(km.near + km.far, exact, rtol=1e-13)


def test_order_above_one_is_allowed_in_scheme():
    g = Grid(UNIT, 256)
    from fraccalc.integral import rl_integral_values
    out = rl_integral_values(np.ones(g.n + 1), 2.5, g.h)
    assert np.allclose(out, g.nodes ** 2.5 / gamma_fn(3.5), rtol=1e-10, atol=1e-14)


def test_pair_and_duality():
    g = Grid(UNIT, 128)
    one = GridFunction(g, np.ones(g.n + 1))
    assert pair(one, one) == pytest.approx(1.0)
    rep = check_duality(parse_function("cosine"), parse_function("sine"), 0.5)
    assert rep.verdict is Verdict.PASS


def test_semigroup_reflection_and_s_to_0():
    f = parse_function("cosine")
    assert check_semigroup(f, 0.3, 0.4).verdict is Verdict.PASS
    assert check_reflection(f, 0.6).verdict is Verdict.PASS
    rep = sweep_s_to_0(f, [0.5, 0.1, 0.01, 0.001])
    assert rep.verdict is Verdict.PASS and rep.errors[-1] < 5e-2
    # orders summing past one are fine
    assert check_semigroup(f, 0.7, 0.6).verdict is Verdict.PASS
    with pytest.raises(ValueError):
        sweep_s_to_0(f, [0.1, 0.5])


def test_zero_maps_to_zero():
    g = Grid(UNIT, 64)
    z = GridFunction.zeros(g)
    for side in Side:
        assert not np.any(frac_int(z, 0.5, side).values)
