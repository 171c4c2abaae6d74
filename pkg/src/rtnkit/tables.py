"""Machine-readable result tables.

CSV is the default format: a schema comment line, a header row, then rows
with floats printed at 17 significant digits (lossless for float64). JSON
output is a bare array of row objects. Both are byte-deterministic for a
fixed row sequence, and both round-trip through read_table.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

SCHEMA_VERSION = "rtnkit.table.v1"


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def rows_to_csv(rows: list[dict], fieldnames: list[str]) -> str:
    lines = [f"# schema={SCHEMA_VERSION}", ",".join(fieldnames)]
    for row in rows:
        lines.append(",".join(format_value(row.get(name, "")) for name in fieldnames))
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[dict]) -> str:
    clean = [{k: (int(v) if isinstance(v, bool) else v) for k, v in row.items()} for row in rows]
    return json.dumps(clean, indent=2) + "\n"


def write_rows(rows: list[dict], fieldnames: list[str], fmt: str = "csv", out=None) -> None:
    """Serialize rows to a path, or to stdout when out is None."""
    if fmt == "csv":
        text = rows_to_csv(rows, fieldnames)
    elif fmt == "json":
        text = rows_to_json(rows)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _parse_cell(text: str):
    if text == "":
        return ""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_table(path) -> list[dict]:
    """Read back a table written by write_rows (CSV or JSON)."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("[") or stripped.startswith("{"):
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("JSON table must be an array of row objects")
        return data
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not lines:
        return []
    fieldnames = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(fieldnames):
            raise ValueError(f"row has {len(cells)} cells, header has {len(fieldnames)}")
        rows.append({name: _parse_cell(cell) for name, cell in zip(fieldnames, cells)})
    return rows
