"""CSV contract of the calwick CLI and its validation.

Every input file must carry the exact header

    scenario,check,mode,param1,param2,value_re,value_im,residual

with `mode` an integer and the last five columns decimal floats.  Any
deviation raises SchemaError naming the offending column, so a corrupted
or foreign CSV is rejected before any figure is drawn.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

EXPECTED_COLUMNS = (
    "scenario",
    "check",
    "mode",
    "param1",
    "param2",
    "value_re",
    "value_im",
    "residual",
)

_FLOAT_COLUMNS = ("param1", "param2", "value_re", "value_im", "residual")


class SchemaError(Exception):
    """Input CSV does not match the report contract."""

    def __init__(self, message: str, column: str = ""):
        super().__init__(message)
        self.column = column


@dataclass
class Row:
    scenario: str
    check: str
    mode: int
    param1: float
    param2: float
    value_re: float
    value_im: float
    residual: float

    @property
    def value(self) -> complex:
        return complex(self.value_re, self.value_im)


def load_csv(path: str) -> list:
    """Read and validate one report CSV; returns a list of Row."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file", column=EXPECTED_COLUMNS[0])
        for got, want in zip(header, EXPECTED_COLUMNS):
            if got != want:
                raise SchemaError(
                    f"{path}: header column {got!r} where {want!r} expected",
                    column=want,
                )
        if len(header) != len(EXPECTED_COLUMNS):
            raise SchemaError(
                f"{path}: expected {len(EXPECTED_COLUMNS)} columns, "
                f"got {len(header)}",
                column=EXPECTED_COLUMNS[min(len(header), 7)],
            )
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(EXPECTED_COLUMNS):
                raise SchemaError(
                    f"{path}:{lineno}: expected {len(EXPECTED_COLUMNS)} fields",
                    column=EXPECTED_COLUMNS[min(len(rec), 7)],
                )
            data = dict(zip(EXPECTED_COLUMNS, rec))
            try:
                mode = int(data["mode"])
            except ValueError:
                raise SchemaError(
                    f"{path}:{lineno}: mode {data['mode']!r} is not an integer",
                    column="mode",
                )
            floats = {}
            for col in _FLOAT_COLUMNS:
                try:
                    floats[col] = float(data[col])
                except ValueError:
                    raise SchemaError(
                        f"{path}:{lineno}: {col} {data[col]!r} is not a number",
                        column=col,
                    )
            rows.append(
                Row(
                    scenario=data["scenario"],
                    check=data["check"],
                    mode=mode,
                    **floats,
                )
            )
    if not rows:
        raise SchemaError(f"{path}: no data rows", column="scenario")
    return rows
