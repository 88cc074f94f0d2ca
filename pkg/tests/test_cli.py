import json
import subprocess
import sys

import pytest

from poisson_krieger.cli import main
from poisson_krieger.cli.runconfig import RunConfig, content_hash

FAST = ["--horizon", "20000", "--samples", "5000", "--K", "1000"]


def run(args):
    return main([str(a) for a in args])


def test_construct_lambda_half(tmp_path, capsys):
    assert run(["construct", "--kind", "iii-lambda", "--lambda", "0.5", "--blocks", "64", "--out", tmp_path]) == 0
    out = capsys.readouterr().out
    first = [l for l in out.splitlines() if l.strip().startswith("1 ")][0]
    assert "1.442695040888963" in first
    spec = json.loads((tmp_path / "spec.json").read_text())
    assert spec == {"kind": "iii-lambda", "n_blocks": 64, "params": {"lambda": 0.5}, "rank": 1}


def test_construct_rejects_dependent_pair(tmp_path, capsys):
    code = run(["construct", "--kind", "iii-1", "--lambda1", "0.5", "--lambda2", "0.25", "--out", tmp_path])
    assert code == 1 and "rationally independent" in capsys.readouterr().err
    assert not (tmp_path / "spec.json").exists()


def test_construct_smoke_ii(tmp_path):
    assert run(["construct", "--kind", "ii-inf", "--blocks", "16", "--out", tmp_path]) == 0


def test_construct_explicit_schedule(tmp_path):
    assert run(["construct", "--kind", "iii-0", "--levels", "1,2", "--starts", "1,5", "--out", tmp_path]) == 0
    assert json.loads((tmp_path / "spec.json").read_text())["schedule"]["levels"] == [1, 2]


def _spec(tmp_path, *args):
    assert run(["construct", *args, "--out", tmp_path]) == 0
    return tmp_path / "spec.json"


def test_verify_ii_exit_zero(tmp_path):
    spec = _spec(tmp_path, "--kind", "ii-inf", "--blocks", "64")
    assert run(["verify", spec, "--out", tmp_path, *FAST[:2], "--K", "1000"]) == 0
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["classification"]["krieger_type"] == "II_INF" and rep["status"] == "verified"
    assert all(v == 0.0 for v in rep["chi"]["values"].values())
    assert rep["metadata"]["content_hash"] == content_hash(rep)


def test_verify_iii0(tmp_path):
    spec = _spec(tmp_path, "--kind", "iii-0", "--blocks", "64")
    assert run(["verify", spec, "--out", tmp_path, "--horizon", "100000", "--K", "1000"]) == 0
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["kakutani_series"]["verdict"] == "DIVERGES"


def test_verify_starved_horizon_exit_two(tmp_path):
    spec = _spec(tmp_path, "--kind", "iii-lambda", "--lambda", "0.5")
    assert run(["verify", spec, "--out", tmp_path, "--horizon", "10"]) == 2


def test_verify_missing_spec(tmp_path):
    assert run(["verify", tmp_path / "nope.json", "--out", tmp_path]) == 1


def test_simulate_and_report(tmp_path):
    spec = _spec(tmp_path, "--kind", "iii-lambda", "--lambda", "0.5")
    assert run(["simulate", spec, "--out", tmp_path, "--samples", "20000", "--seed", "3"]) == 0
    rep = json.loads((tmp_path / "simulate.json").read_text())
    assert rep["ratio_set"]["lam_hat"] == 0.5
    assert (tmp_path / "samples.csv").exists() and (tmp_path / "cocycles.csv").exists()
    assert run(["report", tmp_path]) == 0
    svg = (tmp_path / "theta.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg
    summary = (tmp_path / "summary.md").read_text()
    assert "truncation error budget" in summary
    assert repr(rep["truncation"]["mean"])[:6] in summary


def test_simulate_shell_too_small(tmp_path, capsys):
    spec = _spec(tmp_path, "--kind", "iii-lambda", "--lambda", "0.5")
    code = run(["simulate", spec, "--out", tmp_path, "--samples", "2000", "--shell", "1", "--elements", "1,5"])
    assert code == 1 and "shell radius" in capsys.readouterr().err


def test_report_missing_inputs(tmp_path):
    assert run(["report", tmp_path]) == 1


def test_config_file_and_flag_override(tmp_path):
    cfg = RunConfig(horizon=5000, samples=3000, K=500, seed=7, out=str(tmp_path / "o"))
    (tmp_path / "cfg.json").write_text(json.dumps(cfg.to_dict()))
    spec = _spec(tmp_path, "--kind", "iii-1", "--lambda1", "0.5", "--lambda2", str(1 / 3))
    assert run(["verify", spec, "--config", tmp_path / "cfg.json", "--horizon", "6000"]) == 0
    rep = json.loads((tmp_path / "o" / "verify.json").read_text())
    assert rep["config"]["horizon"] == 6000 and rep["config"]["K"] == 500


def test_unknown_config_field_is_rejected(tmp_path):
    (tmp_path / "cfg.json").write_text(json.dumps({"horizon": 10, "bogus": 1}))
    spec = _spec(tmp_path, "--kind", "ii-inf")
    assert run(["verify", spec, "--config", tmp_path / "cfg.json"]) == 1


def test_console_script_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "poisson_krieger.cli", "construct", "--kind", "ii-inf",
                          "--blocks", "4", "--out", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0 and "wrote" in out.stdout
