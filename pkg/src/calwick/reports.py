"""Machine-readable run reports: bit-exact CSV rows and a JSON summary.

CSV schema (stable across runs and languages): header line

    scenario,check,mode,param1,param2,value_re,value_im,residual

decimal values with 17 significant digits, LF line endings, UTF-8, no
quoting, rows sorted by check id then mode.  Timing information never goes
into CSV files; it lives only in report.json.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

CSV_HEADER = "scenario,check,mode,param1,param2,value_re,value_im,residual"


def _num(x) -> str:
    return f"{float(x):.17g}"


@dataclass
class CheckRecord:
    """One row of a run report: a single check on a single mode."""

    check_id: str
    mode: int
    value: complex
    residual: float
    tolerance: float
    param1: float = 0.0
    param2: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def csv_row(self, scenario: str) -> str:
        return ",".join(
            [
                scenario,
                self.check_id,
                str(self.mode),
                _num(self.param1),
                _num(self.param2),
                _num(self.value.real),
                _num(self.value.imag),
                _num(self.residual),
            ]
        )


def sort_records(records) -> list:
    return sorted(records, key=lambda r: (r.check_id, r.mode, r.param1, r.param2))


def write_check_csv(path: str, scenario: str, records) -> None:
    """Write one check's records as a canonical CSV file."""
    lines = [CSV_HEADER]
    lines.extend(r.csv_row(scenario) for r in sort_records(records))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_check_json(path: str, scenario: str, records) -> None:
    """JSON twin of the CSV rows (same ordering and content)."""
    rows = [
        {
            "scenario": scenario,
            "check": r.check_id,
            "mode": int(r.mode),
            "param1": float(r.param1),
            "param2": float(r.param2),
            "value_re": float(r.value.real),
            "value_im": float(r.value.imag),
            "residual": float(r.residual),
        }
        for r in sort_records(records)
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(rows, fh, indent=1, sort_keys=True)
        fh.write("\n")


def write_report_json(
    path: str, scenario: str, config_hash: str, records, timing: dict
) -> dict:
    """Write the run summary; returns the report dict."""
    recs = [
        {
            "check_id": r.check_id,
            "mode": int(r.mode),
            "residual": float(r.residual),
            "tolerance": float(r.tolerance),
            "pass": r.passed,
        }
        for r in sort_records(records)
    ]
    report = {
        "scenario": scenario,
        "config_hash": config_hash,
        "records": recs,
        "timing": timing,
        "all_pass": all(r["pass"] for r in recs),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return report


def emit(out_dir: str, scenario: str, fmt: str, by_check: dict) -> None:
    """Write one CSV (or JSON) file per check into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    for check_id in sorted(by_check):
        records = by_check[check_id]
        if fmt == "csv":
            write_check_csv(
                os.path.join(out_dir, f"{check_id}.csv"), scenario, records
            )
        else:
            write_check_json(
                os.path.join(out_dir, f"{check_id}.json"), scenario, records
            )
