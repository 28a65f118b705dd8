import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fraccalc import cli
from fraccalc.cli import CHECKS, CampaignConfig, main
from fraccalc.probes import PROBES
from fraccalc.special import gamma_fn


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv(text):
    rows = [r.split(",") for r in text.strip().splitlines()[1:]]
    return np.array([[float(r[0]), float(r[1])] for r in rows])


def test_frac_int_constant(capsys):
    code, out, _ = run(capsys, "frac-int", "--a", "0", "--b", "1", "--n", "1024", "--s", "0.5",
                       "--side", "left", "--fn", "constant:1")
    assert code == 0
    d = _csv(out)
    assert np.max(np.abs(d[:, 1] - 2 * np.sqrt(d[:, 0] / math.pi))) < 1e-4


def test_frac_int_zero_and_out_file(capsys, tmp_path):
    path = tmp_path / "z.csv"
    code, _, _ = run(capsys, "frac-int", "--s", "0.5", "--n", "16", "--fn", "zero", "--out", str(path))
    assert code == 0
    assert not np.any(_csv(path.read_text())[:, 1])
    assert b"\r" not in path.read_bytes()


def test_frac_int_measure(capsys):
    code, out, _ = run(capsys, "frac-int", "--s", "0.3", "--n", "64", "--measure", "{atoms:[{t:0.5,w:1}]}")
    assert code == 0
    d = _csv(out)
    past = d[:, 0] > 0.5
    assert np.allclose(d[past, 1], (d[past, 0] - 0.5) ** -0.7 / gamma_fn(0.3), rtol=1e-12)


@pytest.mark.parametrize("argv,code", [
    (["frac-int", "--s", "1.5", "--fn", "zero"], 3),
    (["frac-int", "--s", "0.5", "--fn", "bogus"], 2),
    (["frac-int", "--s", "0.5"], 2),
    (["frac-int", "--s", "abc", "--fn", "zero"], 2),
    (["frac-int", "--s", "0.5", "--fn", "zero", "--a", "1", "--b", "0"], 3),
    (["verify"], 2),
    (["verify", "--check", "nope"], 2),
    (["probe", "--case", "nope"], 2),
    (["norm", "--kind", "sobolev", "--fn", "linear"], 2),
    (["norm", "--kind", "lp", "--p", "0.5", "--fn", "linear"], 2),
    ([], 2),
])
def test_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err


def test_unknown_check_lists_valid_names(capsys):
    _, _, err = run(capsys, "verify", "--check", "nope")
    assert "semigroup" in err and "marchaud" in err


def test_list_matches_inventory(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == 0
    lines = [ln.strip() for ln in out.splitlines()]
    listed_checks = lines[1:lines.index("probes:")]
    listed_probes = lines[lines.index("probes:") + 1:]
    assert listed_checks == list(CHECKS)
    assert listed_probes == list(PROBES)
    inventory = {"semigroup", "reflection", "duality", "measure-duality", "caputo-duality", "ftc", "marchaud",
                 "representability", "critical-power", "power-rule", "l1-bound", "linf-bound", "weak-type",
                 "weak-type-measure", "bv-embedding", "bv-sup-bound", "ftc-bv", "atom-detection", "s-to-0",
                 "s-to-1", "sobolev-action", "higher-order", "hardy", "weak-lp-embedding", "embedding-catalogue"}
    assert set(listed_checks) == inventory


def test_verify_semigroup_default_config(capsys):
    code, out, _ = run(capsys, "verify", "--check", "semigroup")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] and doc["reports"][0]["verdict"] == "pass"
    assert "wall_time" not in doc["reports"][0]


def test_verify_ftc_critical_power_reports_iii_not_applicable(capsys):
    code, out, _ = run(capsys, "verify", "--check", "ftc", "--fn", "critical-power:0.5")
    details = json.loads(out)["reports"][0]["details"]
    assert details["residual_iii"] == "not-applicable"
    assert details["verdicts"]["iii"] == "not-applicable"
    assert code in (0, 4)


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--check", "critical-power")
    assert code == 4 and not json.loads(out)["ok"]


def test_strict_constants_flag(capsys):
    _, out, _ = run(capsys, "verify", "--check", "sobolev-action")
    rep = json.loads(out)["reports"][0]
    assert rep["details"]["constant_asserted"] is False
    _, out, _ = run(capsys, "verify", "--check", "sobolev-action", "--strict-constants")
    rep = json.loads(out)["reports"][0]
    assert "constant_asserted" not in rep["details"] and rep["verdict"] == "pass"


def test_sweeps(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sweep", "--direction", "to1", "--fn", "jump:0.5", "--out", str(path))
    assert code == 0 and json.loads(out)["verdict"] == "pass"
    assert path.read_text().splitlines()[0] == "s,value,target,gap"
    code, out, _ = run(capsys, "sweep", "--direction", "to0", "--fn", "cosine", "--out", str(path))
    gaps = _csv(path.read_text())
    assert code == 0
    rows = [ln.split(",") for ln in path.read_text().strip().splitlines()[1:]]
    g = [float(r[3]) for r in rows]
    assert all(b < a for a, b in zip(g, g[1:]))
    code, out, _ = run(capsys, "sweep", "--direction", "to1", "--fn", "zero", "--out", str(path))
    rows = [ln.split(",") for ln in path.read_text().strip().splitlines()[1:]]
    assert code == 0 and all(float(r[1]) == 0.0 for r in rows)
    assert gaps.size


def test_probe_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "probe", "--case", "gagliardo-critical", "--s", "0.5")
    assert code == 0 and json.loads(out)["verdict"] == "diverges-as-expected"
    path = tmp_path / "p.csv"
    code, out, _ = run(capsys, "probe", "--case", "left-right", "--s", "0.5", "--out", str(path))
    assert code == 0 and json.loads(out)["details"]["l1_diverges"]
    assert path.read_text().startswith("n,value\n")
    code, _, _ = run(capsys, "probe", "--case", "cos-linfty", "--s", "0.3")
    assert code == 0


def test_norm_commands(capsys):
    code, out, _ = run(capsys, "norm", "--kind", "weak-lp", "--p", "2", "--fn", "constant:3")
    assert code == 0 and json.loads(out)["value_or_flag"] == pytest.approx(3.0)
    code, out, _ = run(capsys, "norm", "--kind", "gagliardo", "--s", "0.5", "--p", "1", "--fn", "linear")
    assert json.loads(out)["value_or_flag"] == pytest.approx(8 / 3, abs=1e-2)
    code, out, _ = run(capsys, "norm", "--kind", "rl-sobolev", "--s", "0.5", "--p", "1", "--fn", "critical-power:0.5")
    assert code == 0 and math.isfinite(json.loads(out)["value_or_flag"])
    code, out, _ = run(capsys, "norm", "--kind", "holder", "--beta", "0.5", "--fn", "linear")
    assert code == 0 and json.loads(out)["value_or_flag"] == pytest.approx(1.0)


def test_config_formats(tmp_path):
    kv = tmp_path / "c.txt"
    kv.write_text("# campaign\nladder = 64, 256\ns_values = 0.3,0.6\ncorpus = cosine, sine\nchecks = semigroup\nseed = 7\n")
    cfg = CampaignConfig.load(kv)
    assert cfg.ladder == [64, 256] and cfg.corpus == ["cosine", "sine"] and cfg.seed == 7
    js = tmp_path / "c.json"
    js.write_text(json.dumps({"ladder": [64, 256], "checks": ["reflection"]}))
    assert CampaignConfig.load(js).checks == ["reflection"]
    js.write_text(json.dumps({"ladder": [256, 64]}))
    with pytest.raises(cli.UsageError):
        CampaignConfig.load(js)
    js.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(cli.UsageError):
        CampaignConfig.load(js)


def test_thread_env(monkeypatch):
    monkeypatch.setenv("FRACCALC_THREADS", "3")
    assert cli.thread_count() == 3
    monkeypatch.setenv("FRACCALC_THREADS", "zero")
    with pytest.raises(cli.UsageError):
        cli.thread_count()


def _campaign(tmp_path, name, threads):
    out = tmp_path / name
    cfg = tmp_path / f"{name}.json"
    cfg.write_text(json.dumps({
        "ladder": [64, 256, 1024], "s_values": [0.3, 0.6], "corpus": ["cosine", "sine"],
        "checks": ["semigroup", "reflection", "duality", "ftc", "marchaud", "l1-bound", "bv-embedding", "power-rule"],
        "output_dir": str(out), "seed": 3,
    }))
    env = {"FRACCALC_THREADS": str(threads), "PATH": "/usr/bin:/bin"}
    proc = subprocess.run([sys.executable, "-m", "fraccalc", "verify", "--config", str(cfg)],
                          capture_output=True, env=env, check=False)
    return proc, out


def test_campaign_is_deterministic_across_thread_counts(tmp_path):
    p1, d1 = _campaign(tmp_path, "one", 1)
    p4, d4 = _campaign(tmp_path, "four", 4)
    assert p1.returncode == p4.returncode == 0, p1.stderr
    assert p1.stdout == p4.stdout
    for name in ("reports.json", "summary.csv"):
        assert (d1 / name).read_bytes() == (d4 / name).read_bytes()


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fraccalc", "verify", "--list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "semigroup" in proc.stdout
