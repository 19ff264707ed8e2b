"""CSV ingestion for the command-line tool."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IngestionError
from .inference import DataSet

MIN_OBSERVATIONS = 10


@dataclass(frozen=True)
class IngestionSpec:
    """How to pull one numeric column out of a delimited text file."""

    path: str
    column: str | int = 0
    delimiter: str = ","
    header: bool = True
    drop_nonpositive: bool = True

    def resolve_column(self, fieldnames):
        if isinstance(self.column, int) or (
            isinstance(self.column, str) and self.column.lstrip("-").isdigit()
        ):
            idx = int(self.column)
            if not 0 <= idx < len(fieldnames):
                raise IngestionError(
                    f"column index {idx} out of range; file has {len(fieldnames)} "
                    f"columns: {fieldnames}"
                )
            return idx
        if self.column in fieldnames:
            return fieldnames.index(self.column)
        raise IngestionError(
            f"column {self.column!r} not found; available columns: {fieldnames}"
        )


@dataclass(frozen=True)
class IngestionResult:
    data: DataSet
    n_raw: int
    n_dropped: int
    warnings: tuple[str, ...]


def read_csv(spec: IngestionSpec) -> IngestionResult:
    """Read one positive numeric column; nonpositive rows are dropped or fatal."""
    path = Path(spec.path)
    if not path.is_file():
        raise IngestionError(f"cannot read data file {spec.path!r}")
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=spec.delimiter)
        try:
            first = next(reader)
        except StopIteration:
            raise IngestionError(f"{spec.path}: file is empty") from None
        if spec.header:
            fieldnames = [c.strip() for c in first]
        else:
            fieldnames = [str(i) for i in range(len(first))]
            rows.append(first)
        idx = spec.resolve_column(fieldnames)
        rows.extend(reader)

    values = []
    for lineno, row in enumerate(rows, start=2 if spec.header else 1):
        if not row or all(not c.strip() for c in row):
            continue
        if idx >= len(row):
            raise IngestionError(f"{spec.path}:{lineno}: row has only {len(row)} fields")
        cell = row[idx].strip()
        try:
            values.append(float(cell))
        except ValueError:
            raise IngestionError(
                f"{spec.path}:{lineno}: cannot parse {cell!r} as a number"
            ) from None

    raw = np.asarray(values, dtype=float)
    keep = np.isfinite(raw) & (raw > 0)
    n_dropped = int((~keep).sum())
    warnings = ()
    if n_dropped:
        if not spec.drop_nonpositive:
            raise IngestionError(
                f"{spec.path}: {n_dropped} nonpositive or non-finite observations "
                "(strict mode)"
            )
        warnings = (f"dropped {n_dropped} nonpositive or non-finite observations",)
    clean = raw[keep]
    if clean.size < MIN_OBSERVATIONS:
        raise IngestionError(
            f"{spec.path}: only {clean.size} usable observations after filtering "
            f"(need >= {MIN_OBSERVATIONS})"
        )
    return IngestionResult(
        data=DataSet(clean, source=str(spec.path)),
        n_raw=raw.size,
        n_dropped=n_dropped,
        warnings=warnings,
    )
