"""Tabular report rows shared by the sweeps, the W-subspace report and
the CLI, with deterministic CSV/JSON rendering.

CSV output starts with the versioned schema comment line and uses
RFC-4180-style quoting with 17-significant-digit floats, so identical
configurations produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

CSV_SCHEMA = "# collardiff-sweep v1"
_COLUMNS = ("ell", "delta", "statistic", "value", "normalized", "status")

# Row status vocabulary; anything else is a bug.
STATUS_OK = "ok"
STATUS_EMPTY = "empty-thin"
STATUS_FAILED = "non-converged"
_STATUSES = {STATUS_OK, STATUS_EMPTY, STATUS_FAILED}


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _jsonable(x: float | None):
    if x is None:
        return None
    x = float(x)
    if math.isfinite(x):
        return x
    # JSON has no Infinity/NaN literals; keep the payload portable.
    return format(x, ".17g")


@dataclass(frozen=True)
class ReportRow:
    ell: float | None
    delta: float | None
    statistic: str
    value: float
    normalized: float | None = None
    status: str = STATUS_OK

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError(f"unknown row status {self.status!r}")


@dataclass
class Report:
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_SCHEMA + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for r in self.rows:
            writer.writerow([_fmt(r.ell), _fmt(r.delta), r.statistic,
                             _fmt(r.value), _fmt(r.normalized), r.status])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = [{
            "ell": _jsonable(r.ell),
            "delta": _jsonable(r.delta),
            "statistic": r.statistic,
            "value": _jsonable(r.value),
            "normalized": _jsonable(r.normalized),
            "status": r.status,
        } for r in self.rows]
        return json.dumps(payload, indent=1)

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown output format {fmt!r}")

    def values(self, statistic: str) -> list:
        return [r for r in self.rows if r.statistic == statistic]

    def single(self, statistic: str) -> ReportRow:
        hits = self.values(statistic)
        if len(hits) != 1:
            raise KeyError(f"expected one {statistic!r} row, found {len(hits)}")
        return hits[0]
