"""CSV and JSON text emitters shared by the modules and the CLI.

Floats are written with ``repr`` (shortest string that round-trips, at most
17 significant digits); rows end with ``\\n``.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def json_text(obj, indent: int | None = 1) -> str:
    return json.dumps(_plain(obj), indent=indent) + "\n"


def table_text(columns, rows, fmt: str = "csv") -> str:
    if fmt == "csv":
        return csv_text(columns, rows)
    if fmt == "json":
        return json_text({"columns": list(columns), "rows": [list(r) for r in rows]})
    raise ValueError(f"unknown format {fmt!r}")
