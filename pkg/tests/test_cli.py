import json

import pytest

import hpimc.checks
import hpimc.cli
from hpimc.cli import main
from hpimc.experiments import RunResult


def test_bounds_defaults(tmp_path, capsys):
    assert main(["bounds", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "bounds" / "bounds_K1.csv").exists()
    assert "bounds_K1.csv" in capsys.readouterr().out


def test_fig1_with_config(tmp_path):
    cfg = tmp_path / "d.cfg"
    cfg.write_text("# short panel d\nn_times = 16\nt_max = 2000\n")
    assert main(["fig1", "--panel", "d", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert sorted(p.name for p in (tmp_path / "o" / "fig1d").iterdir()) == \
        ["approx_d.csv", "exact.csv", "summary.csv"]


def test_mc_with_config(tmp_path):
    cfg = tmp_path / "mc.cfg"
    cfg.write_text("experiment = mc\nmc_sweeps = 3200\n")
    assert main(["mc", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "mc" / "mc.csv").exists()


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n_times = 1\n")
    assert main(["fig1", "--panel", "a", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "n_times" in capsys.readouterr().err
    assert not (tmp_path / "fig1a").exists()
    assert main(["bounds", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path)]) == 2


def test_failed_validation_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(hpimc.cli, "run_bounds",
                        lambda config, out: RunResult(failures=["K=1: ordering violated"]))
    assert main(["bounds", "--out", str(tmp_path)]) == 1
    assert "ordering violated" in capsys.readouterr().err


def test_missing_output_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(hpimc.cli, "run_bounds",
                        lambda config, out: RunResult(files=[tmp_path / "never_written.csv"]))
    assert main(["bounds", "--out", str(tmp_path)]) == 1


def test_check_prints_json_report(capsys):
    assert main(["check", "--suite", "decompose"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["suite"] == "decompose" and report["passed"]
    assert all({"name", "passed", "measured", "threshold"} <= set(c) for c in report["checks"])


def test_check_failure_exit_code(monkeypatch, capsys):
    failing = {"suite": "decompose", "passed": False,
               "checks": [{"name": "x", "passed": False, "measured": 1, "threshold": 0}]}
    monkeypatch.setitem(hpimc.checks.SUITES, "decompose", lambda: failing)
    assert main(["check", "--suite", "decompose"]) == 1
    assert json.loads(capsys.readouterr().out)["passed"] is False


@pytest.mark.parametrize("argv", [
    ["fig1", "--panel", "e"],
    ["check", "--suite", "nonexistent"],
    ["fig1"],
    [],
])
def test_bad_arguments(argv):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == 2
