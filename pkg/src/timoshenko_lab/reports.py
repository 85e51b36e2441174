"""Deterministic CSV / JSON report emission."""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

CANONICAL_COLUMNS = ("t", "norm_w_l2", "norm_w_h2", "norm_psi_l2", "norm_psi_h1", "shear_l2", "energy_l2")


@dataclass
class ReportRecord:
    """One experiment: sampled table, fitted quantities and band checks."""

    experiment: str
    digest: str
    columns: tuple
    rows: list
    checks: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def add_check(self, name: str, value, band, stderr=None):
        lo, hi = band
        value = None if value is None else float(value)
        stderr = None if stderr is None else float(stderr)
        ok = value is not None and math.isfinite(value) and lo <= value <= hi
        self.checks[name] = {"value": value, "stderr": stderr, "band": [lo, hi], "pass": bool(ok)}


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def fmt_number(x) -> str:
    """17 significant digits; exact round trip for doubles."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _json(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        if isinstance(obj, float) and not math.isfinite(obj):
            return "null"
        return fmt_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _json(obj.item(), indent)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj) -> str:
    return _json(obj) + "\n"


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    return fmt_number(v)


def csv_text(records) -> str:
    if not records:
        return ",".join(CANONICAL_COLUMNS) + "\n"
    cols = tuple(records[0].columns)
    if any(tuple(r.columns) != cols for r in records):
        raise ValueError("records in one CSV must share their columns")
    lines = [",".join(cols)]
    for r in records:
        lines += [",".join(_cell(v) for v in row) for row in r.rows]
    return "\n".join(lines) + "\n"


def summary(records) -> dict:
    out = {}
    for r in records:
        out[r.experiment] = {"digest": r.digest, "checks": r.checks, "pass": r.passed, **r.info}
    return out


def emit_reports(records, csv_path, json_path):
    """Write the CSV table and JSON summary; returns the two paths."""
    paths = []
    for path, text in ((csv_path, csv_text(records)), (json_path, dumps_json(summary(records)))):
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(path.name + ".tmp")
            with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except OSError as exc:
            raise OSError(f"cannot write report {path}: {exc}") from exc
        paths.append(path)
    return tuple(paths)
