"""Readers for the documented kslab output formats.

Everything here works purely from files: the run manifest (JSON with a file
inventory), the time-series CSV, the KSLAB1 snapshot format, and sweep
reports. No solver code is imported and no physics is recomputed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class ReportInputError(ValueError):
    """Missing, malformed, or unlisted input files."""


def load_manifest(run_dir) -> dict:
    path = Path(run_dir) / "manifest.json"
    if not path.exists():
        raise ReportInputError(f"{run_dir}: no manifest.json")
    return json.loads(path.read_text())


def listed_file(run_dir, manifest: dict, name: str) -> Path:
    """Resolve a file through the manifest inventory; unlisted files are refused."""
    if name not in manifest.get("files", {}):
        raise ReportInputError(f"{run_dir}: {name!r} is not listed in the manifest")
    path = Path(run_dir) / name
    if not path.exists():
        raise ReportInputError(f"{run_dir}: listed file {name!r} is missing")
    return path


def read_series(path) -> dict:
    """Time-series CSV -> dict of column name to float array."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ReportInputError(f"{path}: empty series CSV")
        names = header.split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if not rows:
        raise ReportInputError(f"{path}: series CSV has no data rows")
    data = np.array(rows, dtype=float)
    if data.shape[1] != len(names):
        raise ReportInputError(f"{path}: ragged series CSV")
    return {name: data[:, i] for i, name in enumerate(names)}


def read_snapshot(path):
    """KSLAB1 snapshot -> (dim, cells, lengths, values array, x fastest)."""
    with open(path) as fh:
        header = fh.readline().split()
        body = fh.read().split()
    if not header or header[0] != "KSLAB1":
        raise ReportInputError(f"{path}: not a KSLAB1 snapshot")
    dim = int(header[1])
    cells = tuple(int(x) for x in header[2 : 2 + dim])
    lengths = tuple(float(x) for x in header[2 + dim : 2 + 2 * dim])
    if len(lengths) != dim:
        raise ReportInputError(f"{path}: malformed snapshot header")
    flat = np.array([float(x) for x in body])
    if flat.size != int(np.prod(cells)):
        raise ReportInputError(f"{path}: snapshot value count mismatch")
    return dim, cells, lengths, flat.reshape(cells, order="F")


def finite_p_columns(series: dict) -> list[float]:
    """The finite exponents recorded as lp_<p> columns, in header order."""
    out = []
    for name in series:
        if name.startswith("lp_") and name != "lp_inf":
            out.append(float(name[3:]))
    return out
