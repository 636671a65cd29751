"""Rows of the output tables and their CSV / JSON writers."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import sys
from collections.abc import Sequence
from logging import getLogger as get_logger
from pathlib import Path
from typing import Any

from ringkg.cli.utils import OutputFormat

logger = get_logger(__name__)


@dataclasses.dataclass(frozen=True)
class SpectrumRow:
    D: int
    n: int
    ntheta: int
    m: int
    j: float | None = None
    j_prime: float | None = None
    m_prime: float | None = None
    E: float | None = None
    binding: float | None = None
    """E - mu."""

    E_NR: float | None = None
    zeta: float | None = None
    status: str = "ok"
    brackets: int | None = None
    iterations: int | None = None
    residual: float | None = None
    message: str = ""


@dataclasses.dataclass(frozen=True)
class LimitsRow:
    D: int
    n: int
    ntheta: int
    m: int
    E: float | None = None
    binding: float | None = None
    E_coulomb: float | None = None
    """Closed form of the Coulomb channel. Empty outside of it."""

    E_series: float | None = None
    E_NR: float | None = None
    limit_residual: float | None = None
    status: str = "ok"
    message: str = ""


@dataclasses.dataclass(frozen=True)
class RadialSampleRow:
    D: int
    n: int
    ntheta: int
    m: int
    E: float
    r: float
    R: float
    g: float
    """r^((D - 1)/2) R(r)."""

    V: float
    """Potential in the equatorial plane, -A/r + B/r^2."""


@dataclasses.dataclass(frozen=True)
class PolarSampleRow:
    D: int
    n: int
    ntheta: int
    m: int
    E: float
    theta: float
    H: float


@dataclasses.dataclass(frozen=True)
class CheckRow:
    D: int
    n: int
    ntheta: int
    m: int
    E: float | None
    check: str
    value: float | None
    tolerance: float | None
    passed: bool | None
    status: str = "ok"


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "" if math.isnan(value) else format(value, ".17g")
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, float):
        return float(value)
    return value


def format_rows(
    rows: Sequence[dict[str, Any]], columns: Sequence[str], format: OutputFormat
) -> str:
    """Renders the rows. Floats keep 17 significant digits in CSV and their shortest
    round-tripping repr in JSON; missing values are empty cells or `null`.

    >>> print(format_rows([{"E": 0.1, "status": "ok"}], ["E", "status"], "csv"), end="")
    E,status
    0.10000000000000001,ok
    """
    if format == "json":
        records = [
            {column: _json_value(row.get(column)) for column in columns} for row in rows
        ]
        return json.dumps(records, indent=2, allow_nan=False) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def write_rows(
    rows: Sequence[Any],
    row_type: type,
    out: Path | None,
    format: OutputFormat,
) -> None:
    """Writes dataclass rows to `out`, or to stdout when `out` is None."""
    columns = [field.name for field in dataclasses.fields(row_type)]
    text = format_rows([dataclasses.asdict(row) for row in rows], columns, format)
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8", newline="\n")
    logger.info(f"Wrote {len(rows)} rows to {out}")
