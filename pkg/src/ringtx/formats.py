"""Deterministic text serialization for CSV/JSON outputs.

Every float is rendered with 12 significant digits so repeated runs with
identical inputs produce byte-identical files. NaN/inf become ``null`` in
JSON and ``nan``/``inf`` in CSV.
"""

from __future__ import annotations

import math

import numpy as np


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _json_scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return fmt_float(x)
    if isinstance(x, str):
        # JSON string escaping; our payloads are plain identifiers/paths
        out = x.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    raise TypeError(f"cannot serialize {type(x).__name__} to JSON")


def to_json(obj, indent: int = 0) -> str:
    """Render dicts/lists/scalars as JSON text with stable float formatting."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{inner}{to_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return _json_scalar(obj)


def dump_json(obj, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(to_json(obj))
        fh.write("\n")


def csv_row(values) -> str:
    cells = []
    for v in values:
        if isinstance(v, str):
            cells.append(v)
        elif isinstance(v, (bool, np.bool_)):
            cells.append("true" if v else "false")
        elif isinstance(v, (int, np.integer)):
            cells.append(str(int(v)))
        else:
            cells.append(fmt_float(v))
    return ",".join(cells)


def dump_csv(path, header, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(csv_row(row) + "\n")
