"""CSV panel ingestion and JSON report documents."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .errors import (
    InvalidArgument,
    NonNumericCell,
    NonPositiveForLog,
    RaggedRows,
    ShapeMismatch,
    ShortPanel,
)
from .panel import as_panel

SCHEMA_VERSION = "1.0"
TRANSFORMS = ("none", "log", "premium")


@dataclass(frozen=True)
class IngestOptions:
    """How to read a panel grid.  Rows are panels unless ``transpose`` is set."""

    has_header: bool = False
    transform: str = "none"
    premium_path: Optional[str] = None
    delimiter: str = ","
    transpose: bool = False

    def __post_init__(self):
        if self.transform not in TRANSFORMS:
            raise InvalidArgument(f"transform must be one of {TRANSFORMS}, got {self.transform!r}")
        if self.transform == "premium" and not self.premium_path:
            raise InvalidArgument("premium normalisation needs a premium file")


def read_grid(path, has_header: bool = False, delimiter: str = ",") -> np.ndarray:
    """Read a rectangular numeric grid; blank lines are skipped."""
    rows: list[list[float]] = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header_pending = has_header
        for lineno, raw in enumerate(reader, start=1):
            if not raw or all(not c.strip() for c in raw):
                continue
            if header_pending:
                header_pending = False
                continue
            if width is None:
                width = len(raw)
            elif len(raw) != width:
                raise RaggedRows(
                    f"line {lineno} has {len(raw)} cells, expected {width}",
                    line=lineno,
                    cells=len(raw),
                    expected=width,
                )
            vals = []
            for col, cell in enumerate(raw, start=1):
                try:
                    v = float(cell.strip())
                except ValueError:
                    raise NonNumericCell(
                        f"non-numeric cell {cell!r} at line {lineno}, column {col}", line=lineno, col=col
                    ) from None
                if not math.isfinite(v):
                    raise NonNumericCell(f"non-finite cell {cell!r} at line {lineno}, column {col}", line=lineno, col=col)
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise InvalidArgument(f"{path} contains no data rows")
    return np.array(rows, dtype=np.float64)


def load_panel_csv(path, options: IngestOptions | None = None, min_time: int = 2) -> np.ndarray:
    """Load an ``(N, T)`` panel from a delimited file and apply the transform.

    ``premium`` divides entrywise by a premium grid of the same shape (read
    with the same options); ``log`` takes natural logarithms and requires
    strictly positive values.
    """
    options = options or IngestOptions()
    y = read_grid(path, options.has_header, options.delimiter)
    if options.transpose:
        y = y.T
    if options.transform == "premium":
        p = read_grid(options.premium_path, options.has_header, options.delimiter)
        if options.transpose:
            p = p.T
        if p.shape != y.shape:
            raise ShapeMismatch(f"premium grid has shape {p.shape}, data has {y.shape}")
        if np.any(p == 0):
            raise InvalidArgument("premium grid contains zeros")
        y = y / p
    elif options.transform == "log":
        if np.any(y <= 0):
            i, j = np.argwhere(y <= 0)[0]
            raise NonPositiveForLog(
                f"log transform needs positive data; found {y[i, j]:g} at panel {i + 1}, time {j + 1}",
                panel=int(i) + 1,
                time=int(j) + 1,
            )
        y = np.log(y)
    if y.shape[1] < min_time:
        raise ShortPanel(f"panel length T={y.shape[1]} is below {min_time}", n_time=int(y.shape[1]))
    return as_panel(y, min_time=min_time)


def write_panel_csv(path, values, delimiter: str = ",", header: Optional[list[str]] = None):
    """Write a grid with shortest round-trip float formatting."""
    arr = np.atleast_2d(np.asarray(values, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter)
        if header:
            w.writerow(header)
        for row in arr:
            w.writerow([repr(float(v)) for v in row])


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (set, tuple)):
        return list(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def report_document(command: str, flags: dict, results: Any, input_info: dict | None = None, timing: dict | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "input": input_info,
        "flags": flags,
        "results": results,
        "timing": timing or {},
    }


def dumps_report(doc: dict) -> str:
    """JSON text; floats use Python's shortest round-trip repr so values reload exactly.

    Infinite values (possible in bootstrap samples under the
    ``count-as-infinite`` policy) are written as ``Infinity``.
    """
    return json.dumps(doc, default=_jsonable, indent=2, sort_keys=False)


def write_report(doc: dict, out=None) -> str:
    text = dumps_report(doc)
    if out:
        tmp = f"{out}.tmp"
        with open(tmp, "w") as fh:
            fh.write(text + "\n")
        os.replace(tmp, out)
    return text


def load_report(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def input_info(path, values: np.ndarray, options: IngestOptions) -> dict:
    return {
        "path": str(path),
        "sha256": file_digest(path),
        "n_panels": int(values.shape[0]),
        "n_time": int(values.shape[1]),
        "transform": options.transform,
        "transpose": options.transpose,
        "premium_path": options.premium_path,
    }
