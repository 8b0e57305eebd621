import json
import os

import numpy as np
import pytest

from shlab.cli import main


def run_cli(args):
    return main(args)


def read_report(path):
    with open(path) as fh:
        return json.load(fh)


def test_exponents_prints_json(capsys):
    code = run_cli(["exponents", "--n", "11", "--p", "7"])
    out = capsys.readouterr().out
    assert code == 0
    data = json.loads(out)
    assert data["sigma"] == pytest.approx(13 / 3, rel=1e-12)
    assert data["lambda"] == pytest.approx(182 / 9, rel=1e-12)


def test_exponents_invalid_params_exit_2(capsys):
    code = run_cli(["exponents", "--n", "11", "--p", "2"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_unknown_flag_exit_2(capsys):
    code = run_cli(["exponents", "--n", "11", "--p", "7", "--bogus", "1"])
    assert code == 2


def test_nonlinear_decay_rejects_ell_outside_window(tmp_path, capsys):
    code = run_cli([
        "nonlinear-decay", "--data", "power-tail", "--ell", "8.0",
        "--output-dir", str(tmp_path), "--points", "256",
    ])
    err = capsys.readouterr().err
    assert code == 2
    assert "ell" in err


def test_missing_config_exit_2(tmp_path, capsys):
    code = run_cli(["exponents", "--config", str(tmp_path / "nope.cfg")])
    assert code == 2


def test_unknown_config_key_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[problem]\nn = 11\nzeta = 3\n")
    code = run_cli(["exponents", "--config", str(cfg)])
    assert code == 2


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "desk.cfg"
    cfg.write_text("[problem]\nn = 11\np = 7.0\n\n[grid]\npoints = 256\n")
    code = run_cli(["exponents", "--config", str(cfg), "--p", "6.95"])
    out = capsys.readouterr().out
    assert code == 0
    assert json.loads(out)["p"] == 6.95


def test_linear_decay_writes_artifacts(tmp_path, capsys):
    code = run_cli([
        "linear-decay", "--output-dir", str(tmp_path),
        "--points", "512", "--t1", "1000",
    ])
    assert code == 0
    assert (tmp_path / "linear_decay_series.csv").is_file()
    assert (tmp_path / "linear_decay_report.json").is_file()
    assert (tmp_path / "linear_decay_series.png").stat().st_size > 0
    rep = read_report(tmp_path / "linear_decay_report.json")
    assert rep["report"]["verdict"] == "PASS"
    assert rep["report"]["effective_config"]["grid"]["points"] == 512
    # CSV carries full precision and the declared header
    lines = (tmp_path / "linear_decay_series.csv").read_text().splitlines()
    assert lines[0] == "t,sup_weighted"
    assert len(lines) == 34


def test_reports_are_deterministic(tmp_path):
    for sub in ("a", "b"):
        code = run_cli([
            "linear-decay", "--output-dir", str(tmp_path / sub),
            "--points", "512", "--t1", "1000", "--no-figures",
        ])
        assert code == 0
    rep_a = read_report(tmp_path / "a" / "linear_decay_report.json")
    rep_b = read_report(tmp_path / "b" / "linear_decay_report.json")
    assert rep_a["report"] == rep_b["report"]
    csv_a = (tmp_path / "a" / "linear_decay_series.csv").read_bytes()
    csv_b = (tmp_path / "b" / "linear_decay_series.csv").read_bytes()
    assert csv_a == csv_b


def test_output_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SHL_OUTPUT_DIR", str(tmp_path))
    code = run_cli(["steady-state", "--points", "256", "--r-max", "30", "--no-figures"])
    assert code == 0
    assert (tmp_path / "steady_state_report.json").is_file()
    rep = read_report(tmp_path / "steady_state_report.json")
    assert rep["report"]["measurements"]["below_v_infinity"] is True
    assert rep["report"]["measurements"]["strictly_decreasing"] is True


def test_steady_state_intersection_verdict(tmp_path):
    code = run_cli([
        "steady-state", "--n", "11", "--p", "3", "--r-max", "40",
        "--output-dir", str(tmp_path), "--no-figures",
    ])
    assert code == 0
    rep = read_report(tmp_path / "steady_state_report.json")
    assert rep["report"]["measurements"]["below_v_infinity"] is False
    assert len(rep["report"]["measurements"]["crossings"]) >= 1


def test_smoothing_check_cmd(tmp_path):
    code = run_cli(["smoothing-check", "--output-dir", str(tmp_path),
                    "--points", "1024", "--no-figures"])
    assert code == 0
    rep = read_report(tmp_path / "smoothing_check_report.json")
    assert rep["report"]["measurements"]["variation"] < 3.0


def test_all_aggregates_exit_status(tmp_path, capsys):
    # default resolution: coarser grids trip the barrier monitor by design
    code = run_cli(["all", "--output-dir", str(tmp_path), "--no-figures"])
    out = capsys.readouterr().out
    reports = [read_report(tmp_path / f) for f in os.listdir(tmp_path) if f.endswith("_report.json")]
    verdicts = [r["report"]["verdict"] for r in reports]
    assert len(verdicts) >= 10
    expected = 1 if any(v == "FAIL" for v in verdicts) else 0
    assert code == expected
    assert out.count(":") >= len(verdicts)
