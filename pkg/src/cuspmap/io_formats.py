"""Deterministic, diffable output formats: CSV, canonical JSON, binary PGM.

Every floating-point number is written with 17 significant digits, enough to
round-trip any double exactly; identical inputs therefore produce
byte-identical files.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["fmt17", "csv_text", "write_csv", "json_text", "write_json", "pgm_bytes", "write_pgm"]


def fmt17(x) -> str:
    """Round-trip decimal form of a double (17 significant digits)."""
    v = float(x)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt17(v)
    return str(v)


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(csv_text(header, rows))


def _json_value(v, out) -> None:
    if v is None:
        out.append("null")
    elif isinstance(v, bool):
        out.append("true" if v else "false")
    elif isinstance(v, (int, np.integer)):
        out.append(str(int(v)))
    elif isinstance(v, (float, np.floating)):
        f = float(v)
        # JSON has no inf/nan literals; encode as strings
        out.append(fmt17(f) if math.isfinite(f) else f'"{fmt17(f)}"')
    elif isinstance(v, str):
        out.append('"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(v, dict):
        out.append("{")
        for i, key in enumerate(sorted(v)):
            if i:
                out.append(",")
            _json_value(str(key), out)
            out.append(":")
            _json_value(v[key], out)
        out.append("}")
    elif isinstance(v, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(v):
            if i:
                out.append(",")
            _json_value(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(v).__name__}")


def json_text(obj) -> str:
    out = []
    _json_value(obj, out)
    return "".join(out) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(json_text(obj))


def pgm_bytes(values: np.ndarray, lo: float = None, hi: float = None) -> bytes:
    """Binary PGM (P5, maxval 255) of a 2D array, linearly clamped to [lo, hi]."""
    a = np.asarray(values, dtype=float)
    if a.ndim != 2:
        raise ValueError("heatmap needs a 2D array")
    lo = float(np.min(a)) if lo is None else float(lo)
    hi = float(np.max(a)) if hi is None else float(hi)
    if hi <= lo:
        hi = lo + 1.0
    scaled = np.clip((a - lo) / (hi - lo), 0.0, 1.0)
    pixels = np.round(scaled * 255.0).astype(np.uint8)
    header = f"P5\n{a.shape[1]} {a.shape[0]}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def write_pgm(path, values, lo: float = None, hi: float = None) -> None:
    with open(path, "wb") as fh:
        fh.write(pgm_bytes(values, lo, hi))
