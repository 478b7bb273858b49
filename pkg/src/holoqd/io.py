"""CSV traces and tables, JSON sidecars and run manifests.

Numbers are written with a fixed format so identical runs give identical
bytes; complex values in JSON are {"re": x, "im": y} pairs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

FLOAT_FMT = "{:.12e}"


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT.format(float(x))
    return str(x)


def trace_columns(labels, phase_label: str | None) -> list[str]:
    cols = ["t_fs"] + [f"P({l})" for l in labels]
    cols += [f"{part}({l})" for l in labels for part in ("re", "im")]
    if phase_label is not None:
        cols.append(f"phase({phase_label})")
    return cols


def trace_csv_text(trace, phase_label: str | None = None, every: int = 1) -> str:
    """Header t_fs, P(label)..., re(label), im(label)..., phase(label)."""
    tr = trace.subsample(every) if every > 1 else trace
    pops = tr.populations
    phase = tr.phase_series(phase_label) if phase_label is not None else None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(trace_columns(tr.labels, phase_label))
    for k, t in enumerate(tr.times):
        row = [_fmt(float(t))] + [_fmt(float(p)) for p in pops[k]]
        for c in tr.states[k]:
            row += [_fmt(float(c.real)), _fmt(float(c.imag))]
        if phase is not None:
            row.append(_fmt(float(phase[k])))
        w.writerow(row)
    return buf.getvalue()


def table_csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    return rows[0], rows[1:]


def to_jsonable(obj):
    """Recursively convert numpy arrays, complex numbers and Fractions."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if math.isnan(x) else x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def complex_matrix(data) -> np.ndarray:
    """Inverse of ``to_jsonable`` for a matrix of {"re", "im"} pairs."""
    return np.array([[complex(z["re"], z["im"]) for z in row] for row in data])


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def config_hash(config: dict) -> str:
    canonical = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class OutputSet:
    """Files written by one run; removed together if the run fails."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.paths: list[Path] = []

    def write_text(self, name: str, text: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / name
        path.write_text(text)
        if path not in self.paths:
            self.paths.append(path)
        return path

    def add(self, path) -> Path:
        path = Path(path)
        if path not in self.paths:
            self.paths.append(path)
        return path

    def remove_all(self):
        for p in self.paths:
            p.unlink(missing_ok=True)
        self.paths.clear()

    def checksums(self) -> dict[str, str]:
        return {p.name: sha256_file(p) for p in sorted(self.paths)}
