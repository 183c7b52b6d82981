"""Byte-stable report documents in plain text or JSON.

A report is a nested dict of plain values. Floats are written with 12
significant digits (distances with 3) and anything below 1e-12 in magnitude
is written as 0, so reruns with the same config and seed are identical.
Complex numbers are (re, im) pairs.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .core import StateVector

SCHEMA_VERSION = "1"
SNAP = 1e-12


class Distance(float):
    """A float rendered with 3 significant digits."""


def _num(x: float, digits: int = 12) -> float:
    x = float(x)
    if abs(x) < SNAP:
        return 0.0
    return float(f"{x:.{digits}g}")


def normalize(value: Any) -> Any:
    """Convert numpy scalars, complex numbers and states to plain values."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Distance):
        return _num(value, 3)
    if isinstance(value, (float, np.floating)):
        return _num(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_num(value.real), _num(value.imag)]
    if isinstance(value, StateVector):
        return amplitude_table(value)
    if isinstance(value, dict):
        return {str(k): normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v) for v in value]
    return value


def amplitude_table(state: StateVector) -> list[dict]:
    """Nonzero amplitudes as rows of (index, re, im)."""
    rows = []
    for i, a in enumerate(state.amplitudes):
        if abs(a) >= SNAP:
            rows.append({"index": i, "re": _num(a.real), "im": _num(a.imag)})
    return rows


def build(command: str, config: dict, results: dict, passed: bool) -> dict:
    return normalize(
        {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "config": config,
            "results": results,
            "pass": passed,
        }
    )


def _scalar(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    return str(v)


def _is_table(v: Any) -> bool:
    return (
        isinstance(v, list)
        and len(v) > 0
        and all(isinstance(r, dict) for r in v)
        and all(list(r) == list(v[0]) for r in v)
        and all(not isinstance(x, (dict, list)) or _flat_list(x) for r in v for x in r.values())
    )


def _flat_list(x: Any) -> bool:
    return isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x)


def _render(key: str, v: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(v, dict):
        out.append(f"{pad}{key}:")
        for k, x in v.items():
            _render(k, x, indent + 1, out)
    elif _is_table(v):
        cols = list(v[0])
        cells = [[_scalar(r[c]) for c in cols] for r in v]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        out.append(f"{pad}{key}:")
        out.append(pad + "  " + "  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip())
        for row in cells:
            out.append(pad + "  " + "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip())
    elif isinstance(v, list) and any(isinstance(x, (dict, list)) and not _flat_list(x) for x in v):
        out.append(f"{pad}{key}:")
        for i, x in enumerate(v):
            _render(f"- [{i}]", x, indent + 1, out)
    else:
        out.append(f"{pad}{key}: {_scalar(v)}")


def render(doc: dict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    out: list[str] = []
    for k, v in doc.items():
        _render(k, v, 0, out)
    return "\n".join(out) + "\n"
