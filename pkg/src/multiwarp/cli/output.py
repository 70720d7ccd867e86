"""Deterministic JSON/CSV emission."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import Optional

__all__ = ["sanitize", "to_json", "to_csv", "emit"]


def sanitize(obj):
    """Replace NaN/inf by ``None`` and tuples by lists, recursively."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return sanitize(obj.item())
    return obj


def to_json(payload: dict) -> str:
    return json.dumps(sanitize(payload), indent=2, allow_nan=False) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, allow_nan=False)
    return str(v)


def _flatten(d: dict, prefix: str = "") -> list:
    rows = []
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            rows += _flatten(v, key + ".")
        else:
            rows.append((key, v))
    return rows


def to_csv(payload: dict) -> str:
    """Tabular payloads (``records``) become one row per record, others key/value pairs."""
    payload = sanitize(payload)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    records = payload.get("records")
    if isinstance(records, list) and records and all(isinstance(r, dict) for r in records):
        header = list(records[0])
        for r in records[1:]:
            header += [k for k in r if k not in header]
        w.writerow(header)
        for r in records:
            w.writerow([_cell(r.get(k)) for k in header])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(payload):
            w.writerow([k, _cell(v)])
    return buf.getvalue()


def emit(payload: dict, path: Optional[str], fmt: Optional[str]) -> None:
    if fmt is None:
        fmt = "csv" if path and path.endswith(".csv") else "json"
    text = to_csv(payload) if fmt == "csv" else to_json(payload)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
