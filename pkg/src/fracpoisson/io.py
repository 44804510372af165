"""Reading and writing event series.

CSV files have a single column with header ``arrival_time`` or
``interarrival``. JSONL files hold one object per event, ``{"t": ...}``
for arrival times or ``{"interarrival": ...}`` for gaps. Lines starting
with ``#`` are comments; writers put a JSON metadata record there.
Floats are written with 17 significant digits so that they round-trip.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .errors import DataError
from .fpp import EventSeries

__all__ = ["read_series", "parse_series", "write_series", "format_series", "fmt_float", "read_metadata"]


def fmt_float(x: float) -> str:
    """Shortest-safe decimal form with 17 significant digits."""
    return format(float(x), ".17g")


def _parse_float(text, lineno):
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"line {lineno}: cannot parse {text!r} as a number", line=lineno) from None
    return v


def parse_series(text: str) -> EventSeries:
    """Parse CSV or JSONL event data from a string."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s and not s.startswith("#"):
            rows.append((lineno, s))
    if not rows:
        raise DataError("no data lines found")
    if rows[0][1].startswith("{"):
        return _parse_jsonl(rows)
    return _parse_csv(rows)


def _parse_csv(rows):
    lineno, header = rows[0]
    name = header.strip().strip('"').lower()
    if name not in ("arrival_time", "interarrival"):
        raise DataError(f"line {lineno}: header must be 'arrival_time' or 'interarrival', got {header!r}",
                        line=lineno)
    vals, lines = [], []
    for ln, s in rows[1:]:
        if "," in s:
            raise DataError(f"line {ln}: expected a single column", line=ln)
        vals.append(_parse_float(s, ln))
        lines.append(ln)
    return _build(np.asarray(vals, float), lines, name == "arrival_time")


def _parse_jsonl(rows):
    vals, lines, kinds = [], [], set()
    for ln, s in rows:
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {ln}: invalid JSON ({exc.msg})", line=ln) from None
        if not isinstance(obj, dict):
            raise DataError(f"line {ln}: expected a JSON object", line=ln)
        if "t" in obj:
            kinds.add("t")
            v = obj["t"]
        elif "interarrival" in obj:
            kinds.add("interarrival")
            v = obj["interarrival"]
        else:
            raise DataError(f"line {ln}: object needs a 't' or 'interarrival' field", line=ln)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DataError(f"line {ln}: value {v!r} is not a number", line=ln)
        vals.append(float(v))
        lines.append(ln)
    if len(kinds) > 1:
        raise DataError("cannot mix 't' and 'interarrival' records in one file")
    return _build(np.asarray(vals, float), lines, kinds == {"t"})


def _build(vals, lines, arrivals: bool):
    try:
        if arrivals:
            return EventSeries.from_arrivals(vals)
        return EventSeries(vals)
    except DataError as exc:
        ln = lines[exc.index] if exc.index is not None and exc.index < len(lines) else None
        raise DataError(f"{exc} (line {ln})", index=exc.index, line=ln) from None


def read_series(path) -> EventSeries:
    """Read an event series from a CSV or JSONL file (``-`` reads stdin)."""
    if str(path) == "-":
        return parse_series(sys.stdin.read())
    return parse_series(Path(path).read_text())


def read_metadata(text: str) -> dict | None:
    """Metadata record from the first ``# {...}`` comment line, if any."""
    for raw in text.splitlines():
        s = raw.strip()
        if s.startswith("#"):
            body = s[1:].strip()
            if body.startswith("{"):
                return json.loads(body)
        elif s:
            break
    return None


def format_series(series: EventSeries, fmt: str = "csv", emit: str = "arrival", metadata: dict | None = None) -> str:
    """Serialize to ``csv`` or ``jsonl``; ``emit`` picks arrival times or gaps."""
    if emit not in ("arrival", "interarrival"):
        raise ValueError(f"emit must be 'arrival' or 'interarrival', got {emit!r}")
    vals = series.arrivals if emit == "arrival" else series.interarrivals
    if emit == "arrival" and vals.size and np.any(np.diff(vals) <= 0):
        raise DataError("gaps below the resolution of the arrival times; emit interarrivals instead")
    out = []
    if metadata is not None:
        out.append("# " + json.dumps(metadata, sort_keys=True))
    if fmt == "csv":
        out.append("arrival_time" if emit == "arrival" else "interarrival")
        out.extend(fmt_float(v) for v in vals)
    elif fmt == "jsonl":
        key = "t" if emit == "arrival" else "interarrival"
        out.extend(f'{{"{key}": {fmt_float(v)}}}' for v in vals)
    else:
        raise ValueError(f"unsupported series format {fmt!r}")
    return "\n".join(out) + "\n"


def write_series(series: EventSeries, path, fmt: str | None = None, emit: str = "arrival",
                 metadata: dict | None = None) -> None:
    """Write to ``path``; the format defaults from the suffix (``.jsonl`` or csv)."""
    if fmt is None:
        fmt = "jsonl" if str(path).endswith(".jsonl") else "csv"
    Path(path).write_text(format_series(series, fmt, emit, metadata))
