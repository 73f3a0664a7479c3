"""CSV ingestion and JSON output for the command-line pipeline.

Curve files are CSV with a header row of grid points and one row of
values per period; scalar files are a single column of numbers.
Writers round-trip values exactly (17 significant digits).
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from .hilbert import FunctionalSeries, Grid, ScalarSeries
from .transforms import DensitySample

__all__ = [
    "DataFormatError",
    "load_curves",
    "save_curves",
    "load_scalars",
    "save_scalars",
    "load_density_sample",
    "RunManifest",
]


class DataFormatError(ValueError):
    """Malformed input file; the message cites the offending row."""


def _parse_rows(path, n_cols: int | None, start_row: int):
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh), start=start_row):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError as exc:
                raise DataFormatError(f"{path}: row {i}: {exc}") from None
            if n_cols is not None and len(vals) != n_cols:
                raise DataFormatError(
                    f"{path}: row {i}: expected {n_cols} cells, got {len(vals)}"
                )
            if not all(np.isfinite(vals)):
                raise DataFormatError(f"{path}: row {i}: non-finite value")
            rows.append(vals)
    return rows


def _read_header(path):
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise DataFormatError(f"{path}: empty file")
    try:
        return [float(c) for c in header]
    except ValueError as exc:
        raise DataFormatError(f"{path}: header: {exc}") from None


def _read_body(path, n_cols: int):
    """Data rows after the header, validated cell by cell."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = []
        for i, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError as exc:
                raise DataFormatError(f"{path}: row {i}: {exc}") from None
            if len(vals) != n_cols:
                raise DataFormatError(
                    f"{path}: row {i}: expected {n_cols} cells, got {len(vals)}"
                )
            if not all(np.isfinite(vals)):
                raise DataFormatError(f"{path}: row {i}: non-finite value")
            rows.append(vals)
    return rows


def load_curves(path) -> FunctionalSeries:
    """Load a functional series from CSV (header row = grid points)."""
    pts = np.asarray(_read_header(path))
    if np.any(np.diff(pts) <= 0):
        raise DataFormatError(f"{path}: header grid is not strictly increasing")
    try:
        grid = Grid(pts)
    except ValueError as exc:
        raise DataFormatError(f"{path}: header: {exc}") from None
    rows = _read_body(path, len(pts))
    if len(rows) < 2:
        raise DataFormatError(f"{path}: need at least 2 data rows")
    return FunctionalSeries(grid, np.asarray(rows))


def save_curves(path, series: FunctionalSeries) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(f"{x:.17g}" for x in series.grid.points)
        for row in series.data:
            writer.writerow(f"{x:.17g}" for x in row)


def load_scalars(path) -> ScalarSeries:
    """Load a scalar series from a single-column CSV (no header)."""
    rows = _parse_rows(path, 1, start_row=1)
    if not rows:
        raise DataFormatError(f"{path}: empty file")
    return ScalarSeries(np.asarray([r[0] for r in rows]))


def save_scalars(path, series: ScalarSeries) -> None:
    with open(path, "w", newline="") as fh:
        for x in series.values:
            fh.write(f"{x:.17g}\n")


def load_density_sample(path, support=None) -> DensitySample:
    """Load densities from CSV; the header carries the native support grid."""
    pts = np.asarray(_read_header(path))
    rows = _read_body(path, pts.size)
    if not rows:
        raise DataFormatError(f"{path}: no density rows")
    if support is None:
        support = (float(pts[0]), float(pts[-1]))
    return DensitySample(support, pts, np.asarray(rows))


def _file_digest(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


@dataclass
class RunManifest:
    """Record of one CLI run, sufficient to reproduce it bit-for-bit."""

    command: str
    inputs: dict
    config: dict
    seed: int
    outputs: dict = field(default_factory=dict)

    def add_output(self, name: str, path) -> None:
        self.outputs[name] = {"path": str(path), "sha256": _file_digest(path)}

    def write(self, path) -> None:
        try:
            version = metadata.version("funflir")
        except metadata.PackageNotFoundError:
            version = "unknown"
        payload = {
            "command": self.command,
            "inputs": {k: {"path": str(v), "sha256": _file_digest(v)}
                       for k, v in self.inputs.items()},
            "config": self.config,
            "seed": self.seed,
            "library_version": version,
            "python": platform.python_version(),
            "outputs": self.outputs,
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")
