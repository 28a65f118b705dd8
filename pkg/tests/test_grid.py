import numpy as np
import pytest

from fraccalc.grid import (EPS_S, Grid, GridFunction, Interval, UNIT, eval_pw_linear,
                           frac_order, read_csv, write_csv)


def test_frac_order_clamps_and_rejects():
    assert frac_order(0.5) == 0.5
    assert frac_order(0.0) == EPS_S
    assert frac_order(1.0) == 1.0 - EPS_S
    assert frac_order(1.5, k=2) == 1.5
    for bad in (-0.1, 1.2, float("nan")):
        with pytest.raises(ValueError):
            frac_order(bad)


def test_interval_validation_and_reflection():
    iv = Interval(1.0, 3.0)
    assert iv.length == 2.0
    assert np.allclose(iv.reflect([1.0, 2.5]), [3.0, 1.5])
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)


def test_grid_nodes_are_exact_at_ends():
    g = Grid(Interval(-1.0, 2.0), 7)
    assert g.nodes[0] == -1.0 and g.nodes[-1] == 2.0
    assert g.h == pytest.approx(3.0 / 7)
    assert g.trapezoid_weights().sum() == pytest.approx(3.0)
    assert g.refine(4).n == 28
    with pytest.raises(ValueError):
        Grid(UNIT, 1)


def test_grid_function_is_immutable_and_validated(grid256):
    u = GridFunction(grid256, np.ones(257))
    with pytest.raises(ValueError):
        u.values[0] = 2.0
    with pytest.raises(ValueError):
        GridFunction(grid256, np.ones(10))
    with pytest.raises(ValueError):
        GridFunction(grid256, np.full(257, np.nan))


def test_arithmetic_requires_same_grid(grid256):
    u = GridFunction.from_callable(grid256, np.sin)
    v = GridFunction.from_callable(Grid(UNIT, 128), np.sin)
    with pytest.raises(ValueError):
        u + v
    assert np.allclose((2 * u - u).values, u.values)


def test_cell_means_enter_quadrature(grid256):
    u = GridFunction(grid256, np.zeros(257), flags={0: "cell-averaged"}, cell_means={0: 4.0})
    assert u.integral() == pytest.approx(0.5 * grid256.h * 4.0)


def test_eval_pw_linear_interpolates(grid256):
    u = GridFunction.from_callable(grid256, lambda x: 3 * x + 1)
    xs = np.linspace(0, 1, 33)
    assert np.allclose(eval_pw_linear(u, xs), 3 * xs + 1)
    with pytest.raises(ValueError):
        eval_pw_linear(u, 1.5)


def test_csv_roundtrip(tmp_path):
    g = Grid(Interval(0.0, 2.0), 16)
    u = GridFunction(g, np.cos(g.nodes), flags={3: "singular"})
    path = tmp_path / "u.csv"
    text = write_csv(u, path)
    assert text.splitlines()[0] == "x,value,flags"
    assert "\r" not in path.read_bytes().decode()
    back = read_csv(path)
    assert back.grid == g
    assert np.array_equal(back.values, u.values)
    assert back.flags == {3: "singular"}
