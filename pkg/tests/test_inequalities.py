import pytest

from fraccalc.corpus import parse_function
from fraccalc.inequalities import (check_critical_power, check_embedding_catalogue, check_hardy,
                                   check_higher_order, check_l1_bound, check_linf_bound, check_power_rule,
                                   check_sobolev_action, check_weak_lp_embedding, check_weak_type)
from fraccalc.report import Verdict


@pytest.mark.parametrize("mu,s", [(1.0, 0.5), (2.0, 0.3), (1.5, 0.7)])
def test_power_rule(mu, s):
    rep = check_power_rule(mu, s)
    assert rep.verdict is Verdict.PASS
    assert rep.details["oracle_abs_error"] <= 1e-9


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_critical_power_integral_part(s):
    rep = check_critical_power(s)
    assert rep.details["integral_ok"]


def test_operator_bounds():
    assert check_l1_bound(n=512).verdict is Verdict.PASS
    assert check_linf_bound(n=512).verdict is Verdict.PASS


@pytest.mark.parametrize("spec", ["linear", "power:3", "sine"])
@pytest.mark.parametrize("s,p", [(0.5, 1.0), (0.3, 2.0), (0.9, 1.0)])
def test_sobolev_action_vanishing_trace(spec, s, p):
    rep = check_sobolev_action(parse_function(spec), s, p)
    assert rep.params["constant"] == "vanishing-trace"
    assert rep.verdict is Verdict.PASS


def test_sobolev_action_general_constant():
    rep = check_sobolev_action(parse_function("cosine"), 0.5, 1.0)
    assert rep.params["constant"] == "general" and rep.verdict is Verdict.PASS
    with pytest.raises(ValueError):
        check_sobolev_action(parse_function("cosine"), 0.6, 2.0)


def test_higher_order_consistency():
    rep = check_higher_order()
    assert rep.verdict is Verdict.PASS and rep.rate >= 0.9


def test_hardy_weak_lp_catalogue_weak_type():
    for check in (check_hardy, check_weak_lp_embedding, check_embedding_catalogue, check_weak_type):
        assert check().verdict is Verdict.PASS, check.__name__
