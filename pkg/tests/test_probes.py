import pytest

from fraccalc.probes import PROBES, probe_csv, run_probe
from fraccalc.report import Verdict


@pytest.mark.parametrize("case", ["gagliardo-critical", "emb-p1-sharp", "cos-linfty", "left-right"])
def test_probe_diverges_as_expected(case):
    rep = run_probe(case)
    assert rep.verdict is Verdict.DIVERGES


def test_cos_linfty_rate():
    vals = run_probe("cos-linfty").errors
    assert all(b >= 1.5 * a for a, b in zip(vals, vals[1:]))


def test_left_right_interior_match():
    rep = run_probe("left-right")
    assert rep.details["interior_l1_error"][-1] <= 1e-2
    assert rep.details["l1_diverges"]


def test_log_right_sup_grows_monotonically():
    vals = run_probe("emb-p1s-sharp").errors
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_probe_csv_and_unknown_case():
    text = probe_csv(run_probe("gagliardo-critical"))
    assert text.splitlines()[0] == "n,value" and text.endswith("\n")
    with pytest.raises(KeyError):
        run_probe("nope")
    assert set(PROBES) == {"gagliardo-critical", "emb-p1-sharp", "emb-p1s-sharp", "cos-linfty", "left-right"}
