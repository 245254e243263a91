"""Canonical CSV/JSON report emission: formatting, ordering, byte layout."""

import json

from calwick import reports


def _records():
    return [
        reports.CheckRecord("beta_check", 2, 0.5 + 0.25j, 1e-12, 1e-10),
        reports.CheckRecord("alpha_check", -1, 1.0 + 0.0j, 2e-9, 1e-10, param1=3.0),
        reports.CheckRecord("alpha_check", -1, 1.0 + 0.0j, 0.0, 1e-10, param1=1.0),
        reports.CheckRecord("alpha_check", -3, 1.0 / 3.0 + 0.0j, 0.0, 1e-10),
    ]


def test_pass_flag():
    assert reports.CheckRecord("c", 0, 0j, 1e-11, 1e-10).passed
    assert not reports.CheckRecord("c", 0, 0j, 2e-10, 1e-10).passed


def test_sort_order():
    ordered = reports.sort_records(_records())
    keys = [(r.check_id, r.mode, r.param1) for r in ordered]
    assert keys == [
        ("alpha_check", -3, 0.0),
        ("alpha_check", -1, 1.0),
        ("alpha_check", -1, 3.0),
        ("beta_check", 2, 0.0),
    ]


def test_csv_row_17_significant_digits():
    rec = reports.CheckRecord("c", 1, (1.0 / 3.0) + 0.1j, 0.0, 1e-10)
    row = rec.csv_row("demo")
    assert row == "demo,c,1,0,0,0.33333333333333331,0.10000000000000001,0"


def test_csv_bytes_and_header(tmp_path):
    path = tmp_path / "out.csv"
    reports.write_check_csv(str(path), "demo", _records())
    data = path.read_bytes()
    assert b"\r" not in data
    assert data.endswith(b"\n")
    lines = data.decode("utf-8").splitlines()
    assert lines[0] == reports.CSV_HEADER
    assert len(lines) == 5
    # byte-identical across repeated writes
    path2 = tmp_path / "out2.csv"
    reports.write_check_csv(str(path2), "demo", list(reversed(_records())))
    assert path2.read_bytes() == data


def test_json_rows_mirror_csv(tmp_path):
    path = tmp_path / "out.json"
    reports.write_check_json(str(path), "demo", _records())
    rows = json.loads(path.read_text())
    assert len(rows) == 4
    assert rows[0]["check"] == "alpha_check"
    assert isinstance(rows[0]["mode"], int)
    assert isinstance(rows[0]["residual"], float)


def test_report_json_serializable(tmp_path):
    path = tmp_path / "report.json"
    rep = reports.write_report_json(
        str(path), "demo", "abc123", _records(), {"total_s": 0.5}
    )
    loaded = json.loads(path.read_text())
    assert loaded == rep
    assert loaded["all_pass"] is False   # alpha_check has a 2e-9 > 1e-10 row
    assert loaded["timing"]["total_s"] == 0.5


def test_emit_one_file_per_check(tmp_path):
    by_check = {"a": _records()[:2], "b": _records()[2:]}
    reports.emit(str(tmp_path), "demo", "csv", by_check)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.csv", "b.csv"]
