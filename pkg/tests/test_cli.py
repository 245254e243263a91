"""End-to-end CLI behaviour: exit codes, output files, determinism."""

import json

import pytest

from calwick import cli, reports

SMALL_CFG = """
name = "small"
metric.N = {"family": "constant", "params": [1.0]}
metric.h = {"family": "constant", "params": [1.0]}
metric.w = {"family": "constant", "params": [0.0]}
metric.mu = {"family": "constant", "params": [1.0]}
sigma.circumference = 6.283185307179586
sigma.mode_max = 2
euclidean.bc = "periodic"
euclidean.beta = 2.0
euclidean.n_s = 101
lorentzian.T = 1.0
lorentzian.n_t = 101
checks = ["hypotheses", "calderon_sum", "ccr", "equal_time_amplitude"]
"""


@pytest.fixture()
def small_cfg(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL_CFG)
    return path


def test_check_subcommand_passes(small_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    code = cli.main(["check", str(small_cfg), "--out", str(out)])
    assert code == 0
    captured = capsys.readouterr().out
    assert "records pass" in captured
    assert (out / "hypotheses.csv").exists()
    assert (out / "report.json").exists()
    report = json.loads((out / "report.json").read_text())
    assert report["all_pass"] is True
    assert "timing" in report


def test_csv_header_bytes(small_cfg, tmp_path):
    out = tmp_path / "out"
    assert cli.main(["all", str(small_cfg), "--out", str(out)]) == 0
    data = (out / "calderon_sum.csv").read_bytes()
    assert data.splitlines()[0] == reports.CSV_HEADER.encode("utf-8")
    assert b"\r" not in data


def test_all_deterministic(small_cfg, tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert cli.main(["all", str(small_cfg), "--out", str(out1)]) == 0
    assert cli.main(["all", str(small_cfg), "--out", str(out2)]) == 0
    names = sorted(p.name for p in out1.iterdir() if p.suffix == ".csv")
    assert names
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_json_format(small_cfg, tmp_path):
    out = tmp_path / "out"
    assert cli.main(["check", str(small_cfg), "--out", str(out), "--format", "json"]) == 0
    rows = json.loads((out / "hypotheses.json").read_text())
    assert rows and rows[0]["scenario"] == "small"


def test_mode_cap(small_cfg, tmp_path):
    out = tmp_path / "out"
    assert cli.main(["all", str(small_cfg), "--out", str(out), "--modes", "1"]) == 0
    lines = (out / "calderon_sum.csv").read_text().splitlines()
    modes = {int(line.split(",")[2]) for line in lines[1:]}
    assert modes == {-1, 0, 1}


def test_bad_config_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text('name = "bad"\n')
    assert cli.main(["check", str(path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_impossible_tolerance_exits_1(small_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    code = cli.main(
        ["twopoint", str(small_cfg), "--out", str(out), "--tol-scale", "1e-12"]
    )
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_converge_levels_validated(small_cfg, capsys):
    assert cli.main(["converge", str(small_cfg), "--levels", "2"]) == 2
    assert "levels" in capsys.readouterr().err
