"""Result records and their CSV / JSON persistence.

Both formats are byte-deterministic: rows are sorted by (suite, check),
floats are written with ``repr`` and JSON keys are sorted.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

__all__ = ["ResultRecord", "CSV_HEADER", "csv_cell", "jsonable", "emit_report", "render_report", "parse_report", "load_report"]

CSV_HEADER = ["suite", "check", "status", "value", "expected", "tolerance", "runtime_ms"]


@dataclass
class ResultRecord:
    suite: str
    check: str
    status: str  # "pass" | "fail"
    value: float | str | None = None
    expected: float | str | None = None
    tolerance: float | str | None = None
    runtime_ms: float = 0.0
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def key(self) -> tuple[str, str]:
        return (self.suite, self.check)


def csv_cell(x) -> str:
    if isinstance(x, np.generic):
        x = x.item()
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _uncell(text: str):
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        return text


def jsonable(x):
    # json has no inf/nan; spell them as strings
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return jsonable(x.item())
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def render_report(records: Iterable[ResultRecord], fmt: str) -> str:
    rows = sorted(records, key=lambda r: r.key)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([csv_cell(getattr(r, col)) for col in CSV_HEADER])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([jsonable(asdict(r)) for r in rows], sort_keys=True, indent=2) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(records: Iterable[ResultRecord], fmt: str, path: str | None) -> None:
    """Write the report to ``path`` (stdout when ``path`` is None or '-')."""
    text = render_report(records, fmt)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report to {path}: {exc.strerror}") from None


def parse_report(text: str, fmt: str) -> list[ResultRecord]:
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        out = []
        for row in reader:
            out.append(
                ResultRecord(
                    suite=row["suite"],
                    check=row["check"],
                    status=row["status"],
                    value=_uncell(row["value"]),
                    expected=_uncell(row["expected"]),
                    tolerance=_uncell(row["tolerance"]),
                    runtime_ms=float(row["runtime_ms"]),
                )
            )
        return out
    if fmt == "json":
        return [ResultRecord(**item) for item in json.loads(text)]
    raise ValueError(f"unknown report format {fmt!r}")


def load_report(path: str, fmt: str) -> list[ResultRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_report(fh.read(), fmt)
