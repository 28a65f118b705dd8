import math

import numpy as np
import pytest

from fraccalc.corpus import AnalyticFunction, parse_function, sample
from fraccalc.grid import Grid, GridFunction, UNIT
from fraccalc.measures import (BVFunction, RadonMeasure, bv_corpus, cantor_blocks, check_atom_detection,
                               check_bv_embedding, check_bv_sup_bound, check_ftc_bv, check_measure_duality,
                               check_weak_type_measure, derivative_measure, distributional_frac_deriv,
                               embedding_constant, frac_int_measure, hat_panel, pairing, sweep_s_to_1)
from fraccalc.report import Verdict
from fraccalc.special import gamma_fn


def test_atom_kernel():
    g = Grid(UNIT, 64)
    m = RadonMeasure(None, ((0.5, 1.0),), "delta", (), UNIT)
    v = frac_int_measure(m, 0.3, g)
    past = g.nodes > 0.5
    assert np.allclose(v.values[past], (g.nodes[past] - 0.5) ** -0.7 / gamma_fn(0.3), rtol=1e-13)
    assert not np.any(v.values[g.nodes < 0.5])
    assert v.flags[32] == "near-atom"


def test_atom_off_node_has_exact_cell_means():
    g = Grid(UNIT, 100)
    m = RadonMeasure(None, ((0.3333, 2.0),), "delta", (), UNIT)
    v = frac_int_measure(m, 0.5, g)
    # the quadrature reproduces the exact integral 2 (1 - t)^s / Gamma(s + 1)
    assert v.integral() == pytest.approx(2 * (1 - 0.3333) ** 0.5 / gamma_fn(1.5), rel=1e-12)


def test_measure_validation_and_json():
    with pytest.raises(ValueError):
        RadonMeasure(None, ((1.5, 1.0),))
    with pytest.raises(ValueError):
        RadonMeasure(None, ((0.5, 1.0), (0.5, 2.0)))
    m = RadonMeasure(None, ((0.25, -1.0), (0.5, 2.0)), "two")
    back = RadonMeasure.from_json(m.to_json())
    assert back.atoms == m.atoms and back.total_variation() == 3.0 and back.total_mass() == 1.0


def test_derivative_measure_of_bv_function():
    g = Grid(UNIT, 256)
    u = BVFunction(0.5, ((0.25, 2.0),), AnalyticFunction.make("constant", 1.0), 3, 0.5)
    Du = derivative_measure(u, g)
    assert Du.atoms == ((0.25, 2.0),)
    # total mass equals u(b) - u(a+)
    assert Du.total_mass() == pytest.approx(float(u(np.array([1.0]))[0]) - 0.5, rel=1e-12)
    assert sum(b.rho * (b.hi - b.lo) for b in cantor_blocks(3, UNIT, 0.5)) == pytest.approx(0.5)


def test_bv_sampling_on_jump_node():
    g = Grid(UNIT, 8)
    u = BVFunction(jumps=((0.5, 1.0),)).on(g)
    assert u.values[4] == 0.5 and u.values[5] == 1.0


def test_pairing_with_hats():
    g = Grid(UNIT, 64)
    panel = hat_panel(UNIT)
    assert len(panel) == 5
    m = RadonMeasure(None, ((0.25, 3.0),), "d")
    assert pairing(m, panel[1](g)) == pytest.approx(3.0)


def test_measure_duality():
    mk = lambda g: RadonMeasure(sample(parse_function("cosine"), g), ((0.3, 1.0),))  # noqa: E731
    rep = check_measure_duality(mk, parse_function("sine"), 0.4)
    assert rep.verdict is Verdict.PASS


def test_weak_type_for_delta():
    rep = check_weak_type_measure(0.5, 0.4)
    assert rep.verdict is Verdict.PASS
    assert all(v < 2.0 / gamma_fn(0.4) for v in rep.errors)


def test_distributional_derivative_constant():
    g = Grid(UNIT, 512)
    D = distributional_frac_deriv(BVFunction(2.0), 0.3, g)
    x = g.nodes[1:]
    assert np.allclose(D.ac_density.values[1:], 2 * x ** -0.3 / gamma_fn(0.7), rtol=1e-10)
    assert D.ac_density.flags[0] == "singular"


@pytest.mark.parametrize("u", bv_corpus(), ids=lambda u: u.label)
def test_bv_embedding_corpus(u):
    assert check_bv_embedding(u, 0.5).verdict is Verdict.PASS
    assert check_bv_sup_bound(u).verdict is Verdict.PASS


def test_embedding_constant_formula():
    s = 0.5
    assert embedding_constant(s) == pytest.approx(max(1 + 1 / gamma_fn(1.5), 2 / gamma_fn(1.5)))


@pytest.mark.parametrize("u", [BVFunction(jumps=((0.5, 1.0),), label="jump"), BVFunction(1.0, label="one")],
                         ids=["jump", "constant"])
def test_s_to_1_sweep(u):
    rep = sweep_s_to_1(u, hat_panel(), [0.5, 0.7, 0.9, 0.95, 0.99])
    assert rep.verdict is Verdict.PASS
    assert rep.errors[-1] < 5e-2


def test_atom_detection():
    rep = check_atom_detection()
    assert rep.verdict is Verdict.PASS
    assert [a["t"] for a in rep.details["atoms"]] == [0.25]
    assert not rep.details["atom_at_d"]


def test_ftc_bv():
    rep = check_ftc_bv(parse_function("shifted-critical:0.25:0.75:0.5"), 0.5)
    assert rep.verdict is Verdict.PASS
