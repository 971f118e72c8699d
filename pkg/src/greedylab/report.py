"""Deterministic report files: summary.json, detail.csv and plot.csv."""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

FLOAT_FMT = "%.12g"


@dataclass
class Assertion:
    invariant: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {"invariant": self.invariant, "passed": self.passed, "detail": self.detail}


@dataclass
class Results:
    command: str
    config: dict
    summary: dict = field(default_factory=dict)
    header: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    plot: list = field(default_factory=list)  # (series, x, y)
    assertions: list = field(default_factory=list)

    def check(self, invariant: str, passed: bool, detail: str = "") -> bool:
        self.assertions.append(Assertion(invariant, bool(passed), detail))
        return bool(passed)

    @property
    def ok(self) -> bool:
        return all(a.passed for a in self.assertions)


def _fmt_float(v: float):
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(FLOAT_FMT % v)


def normalize(obj):
    """JSON-ready copy with floats rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if hasattr(obj, "to_dict"):
        return normalize(obj.to_dict())
    return obj


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return FLOAT_FMT % f if math.isfinite(f) else str(_fmt_float(f))
    if v is None:
        return ""
    return str(v)


def emit_report(results: Results, out_dir, plot_data: bool = False) -> list:
    """Write summary.json and detail.csv (and plot.csv) under ``out_dir``.

    Identical results give byte-identical files.
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {out_dir}: {e}") from e
    summary = {
        "command": results.command,
        "config": results.config,
        "results": results.summary,
        "assertions": [a.to_dict() for a in results.assertions],
        "passed": results.ok,
        "row_count": len(results.rows),
    }
    paths = []
    p = os.path.join(out_dir, "summary.json")
    _write(p, json.dumps(normalize(summary), sort_keys=True, indent=2) + "\n")
    paths.append(p)
    p = os.path.join(out_dir, "detail.csv")
    _write_csv(p, results.header, results.rows)
    paths.append(p)
    if plot_data:
        p = os.path.join(out_dir, "plot.csv")
        _write_csv(p, ["series", "x", "y"], results.plot)
        paths.append(p)
    return paths


def _write(path, text):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if header:
                w.writerow(header)
            for r in rows:
                w.writerow([_cell(v) for v in r])
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e
