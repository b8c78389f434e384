import json
import subprocess
import sys

import pytest

from lightcone.cli import config_hash, main


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_describe_is_seed_independent(tmp_path, capsys):
    cfg = write(tmp_path, {"scenario": "plr-project", "R": 1.5})
    assert main(["describe", "--config", cfg, "--seed", "1"]) == 0
    a = capsys.readouterr().out
    assert main(["describe", "--config", cfg, "--seed", "99"]) == 0
    b = capsys.readouterr().out
    assert a == b
    assert "R: 1.5" in a and "steps:" in a


def test_even_dimension_rejected(tmp_path, capsys):
    cfg = write(tmp_path, {"scenario": "radiation", "dimension": 4})
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "dimension: 4" in err and "odd" in err
    assert not (tmp_path / "o").exists()


def test_schema_error_names_the_path(tmp_path, capsys):
    cfg = write(tmp_path, {"scenario": "radiation", "grid": {"M": -3}})
    assert main(["run", "--config", cfg]) == 2
    assert "grid.M" in capsys.readouterr().err


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = write(tmp_path, {"scenario": "radiation", "colour": 1})
    assert main(["run", "--config", cfg]) == 2
    assert "colour" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2


def test_r_max_and_s_max_must_agree(tmp_path):
    cfg = write(tmp_path, {"scenario": "radiation", "grid": {"r_max": 8.0, "s_max": 16.0}})
    assert main(["run", "--config", cfg]) == 2


def test_radiation_run_writes_report(tmp_path, capsys):
    cfg = {"scenario": "radiation", "grid": {"M": 256, "s_max": 16.0}}
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["passed"] is True
    assert rep["config_hash"] == config_hash(rep["config"])
    assert rep["tolerance_version"]
    for name in rep["files"]:
        assert (out / name).exists()
    assert "[  ok]" in capsys.readouterr().out


def test_subcommand_form(tmp_path):
    out = tmp_path / "o"
    assert main(["plr-project", "--seed", "3", "--out", str(out)]) == 0
    assert json.loads((out / "report.json").read_text())["config"]["seed"] == 3


def test_divergent_phi_exits_one(tmp_path):
    cfg = {
        "scenario": "nonlinear-phi",
        "size": 8.0,
        "grid": {"M": 512, "s_max": 32.0, "T_w": 10.0, "dt": 0.05},
    }
    out = tmp_path / "o"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 1
    rep = json.loads((out / "report.json").read_text())
    assert rep["passed"] is False


def test_console_script_version():
    r = subprocess.run([sys.executable, "-m", "lightcone.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.startswith("lightcone ")


@pytest.mark.parametrize("scenario", ["radiation", "invert", "exterior-energy"])
def test_describe_every_scenario(scenario, capsys):
    assert main(["describe", "--scenario", scenario]) == 0
    assert f"scenario: {scenario}" in capsys.readouterr().out
