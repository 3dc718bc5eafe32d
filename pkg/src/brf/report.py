"""Deterministic JSON serialization and a markdown view derived from it."""

from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

FLOAT_DIGITS = 12


def _float(v: float):
    if math.isnan(v) or math.isinf(v):
        return None
    return float(f"{v:.{FLOAT_DIGITS}e}")


def rational(v: Fraction) -> dict:
    return {"num": v.numerator, "den": v.denominator, "decimal": f"{float(v):.{FLOAT_DIGITS}g}"}


def to_jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return to_jsonable(obj.tolist())
    return str(obj)


def dumps(payload) -> str:
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n"


def _is_rational(v) -> bool:
    return isinstance(v, dict) and set(v) == {"num", "den", "decimal"}


def _cell(v) -> str:
    if _is_rational(v):
        return f"{v['num']}/{v['den']}" if v["den"] != 1 else str(v["num"])
    if isinstance(v, list):
        return "(" + ", ".join(_cell(x) for x in v) + ")"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_cell(x)}" for k, x in v.items()) + "}"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def to_markdown(payload) -> str:
    """Scalars as a key/value list, lists of flat records as tables."""
    data = to_jsonable(payload)
    lines = [f"# {data.get('command', 'report')}", ""]
    tables = []
    for key in sorted(data):
        val = data[key]
        if isinstance(val, list) and val and all(isinstance(r, dict) and not _is_rational(r) for r in val):
            tables.append((key, val))
        else:
            lines.append(f"- **{key}**: {_cell(val)}")
    for key, rows in tables:
        cols = sorted({c for r in rows for c in r})
        lines += ["", f"## {key}", "", "| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        for r in rows:
            lines.append("| " + " | ".join(_cell(r.get(c, "")) for c in cols) + " |")
    return "\n".join(lines) + "\n"


def write(payload, prefix) -> tuple[Path, Path]:
    prefix = Path(prefix)
    if prefix.suffix in (".json", ".md"):
        prefix = prefix.with_suffix("")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    js, md = prefix.with_suffix(".json"), prefix.with_suffix(".md")
    js.write_text(dumps(payload))
    md.write_text(to_markdown(payload))
    return js, md
