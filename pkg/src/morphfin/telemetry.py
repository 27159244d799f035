"""Telemetry CSV format: one row per sampled instant, strict fixed header."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, TextIO

from .errors import TelemetryFormatError

HEADER = (
    "time_s,x_m,y_m,depth_m,yaw_deg,yaw_rate_dps,surge_mps,sway_mps,"
    "servo_deg,torque_nm,power_w,erection,syringe_ml"
)

_COLUMNS = HEADER.split(",")


@dataclass(frozen=True)
class TelemetryRecord:
    time_s: float
    x_m: float
    y_m: float
    depth_m: float
    yaw_deg: float
    yaw_rate_dps: float
    surge_mps: float
    sway_mps: float
    servo_deg: float
    torque_nm: float
    power_w: float
    erection: float
    syringe_ml: float

    def row(self) -> str:
        return ",".join(format(getattr(self, c), ".9g") for c in _COLUMNS)


def format_record(record: TelemetryRecord) -> str:
    """One CSV row (no newline), 9 significant digits per field."""
    return record.row()


def write_telemetry(records: Iterable[TelemetryRecord], destination) -> int:
    """Write records as CSV; returns the byte count written.

    Raises OSError (I/O error with path) on an unwritable destination.
    """
    records = list(records)
    if not records:
        raise TelemetryFormatError("no records to write")
    _validate(records)
    text = HEADER + "\n" + "\n".join(r.row() for r in records) + "\n"
    data = text.encode("ascii")
    Path(destination).write_bytes(data)
    return len(data)


def stream_records(records: Iterable[TelemetryRecord], out: TextIO) -> None:
    """Newline-delimited rows (same column order, no header) for live piping."""
    for record in records:
        out.write(record.row() + "\n")


def _validate(records: list[TelemetryRecord]) -> None:
    prev = -math.inf
    for i, r in enumerate(records):
        for f in fields(TelemetryRecord):
            if not math.isfinite(getattr(r, f.name)):
                raise TelemetryFormatError(f"non-finite {f.name} in record {i}")
        if not r.time_s > prev:
            raise TelemetryFormatError(f"time not strictly increasing at record {i}")
        prev = r.time_s


def read_telemetry(source) -> list[TelemetryRecord]:
    """Parse a telemetry CSV, enforcing the exact header and monotone time."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    return _parse(text)


def _parse(text: str) -> list[TelemetryRecord]:
    lines = text.splitlines()
    if not lines:
        raise TelemetryFormatError("empty file: header row required", line=1)
    if lines[0] != HEADER:
        raise TelemetryFormatError(
            f"header mismatch: expected {HEADER!r}, got {lines[0]!r}", line=1
        )
    records: list[TelemetryRecord] = []
    prev_time = -math.inf
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(_COLUMNS):
            raise TelemetryFormatError(
                f"expected {len(_COLUMNS)} columns, got {len(parts)}", line=lineno
            )
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise TelemetryFormatError(str(exc), line=lineno) from exc
        if not all(math.isfinite(v) for v in values):
            raise TelemetryFormatError("non-finite value", line=lineno)
        if not values[0] > prev_time:
            raise TelemetryFormatError("time not strictly increasing", line=lineno)
        prev_time = values[0]
        records.append(TelemetryRecord(*values))
    if not records:
        raise TelemetryFormatError("file has a header but no records", line=2)
    return records
