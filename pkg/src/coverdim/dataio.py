"""CSV point-cloud I/O.

Dialect: comma separated, '.' decimal point, one point per row, no header by
default. Blank lines and lines starting with '#' are ignored. Values are
written with shortest round-trip float formatting, so write -> read is
lossless.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .linalg import PointSet


class DataFormatError(ValueError):
    """Malformed input data (bad CSV cell, row width mismatch, corrupt state file)."""


def parse_points_csv(lines, source: str = "<input>", first_lineno: int = 1) -> PointSet:
    """Parse CSV rows from an iterable of lines, reporting 1-based line numbers."""
    rows = []
    width = None
    for lineno, line in enumerate(lines, start=first_lineno):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = stripped.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataFormatError(
                f"{source}, line {lineno}: expected {width} columns, got {len(cells)}"
            )
        try:
            rows.append([float(cell) for cell in cells])
        except ValueError as exc:
            raise DataFormatError(f"{source}, line {lineno}: {exc}") from exc
    if not rows:
        raise DataFormatError(f"{source}: empty dataset")
    try:
        return PointSet(np.asarray(rows))
    except ValueError as exc:
        raise DataFormatError(f"{source}: {exc}") from exc


def read_points_csv(path: str, skip_header: bool = False) -> PointSet:
    """Read a point set from a CSV file ('-' reads standard input)."""
    if path == "-":
        import sys

        lines = sys.stdin.readlines()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    first = 1
    if skip_header and lines:
        lines = lines[1:]
        first = 2
    return parse_points_csv(lines, source=path, first_lineno=first)


def write_points_csv(path: str, points: PointSet) -> None:
    """Write a point set as CSV with round-trip-exact float formatting."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in points.points:
            fh.write(",".join(repr(float(value)) for value in row))
            fh.write("\n")


def write_sidecar(path: str, metadata: dict) -> str:
    """Write provenance metadata next to a dataset as ``<path>.meta.json``."""
    sidecar = f"{path}.meta.json"
    tmp = f"{sidecar}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(metadata, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, sidecar)
    return sidecar
