"""Reader for experiment result files.

The layout is a block of ``# meta: key=value`` lines, one comma-separated
header row naming the columns, then numeric rows. Columns are addressed by
header name, so files stay readable here if the producer reorders or
extends its fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path


class SchemaError(ValueError):
    """A results file does not match the expected layout."""


@dataclass
class ResultTable:
    path: str
    meta: dict
    columns: dict

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values())))

    def column(self, name: str) -> list:
        if name not in self.columns:
            raise SchemaError(f"{self.path}: missing column {name!r}")
        return self.columns[name]

    def label(self) -> str:
        opt = self.meta.get("optimizer")
        strat = self.meta.get("strategy")
        if opt and strat:
            return f"{opt}-{strat}"
        return Path(self.path).stem


def _is_header(fields) -> bool:
    # a data row parses entirely as floats; a header cannot
    for f in fields:
        try:
            float(f)
        except ValueError:
            return True
    return False


def read_results(path) -> ResultTable:
    path = str(path)
    meta = {}
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("meta:"):
                    key, _, value = body[len("meta:"):].strip().partition("=")
                    meta[key.strip()] = value.strip()
                continue
            fields = [f.strip() for f in line.split(",")]
            if header is None:
                if not _is_header(fields):
                    raise SchemaError(f"{path}: line {lineno}: missing header row")
                if len(set(fields)) != len(fields):
                    raise SchemaError(f"{path}: line {lineno}: duplicate column names")
                header = fields
                continue
            if len(fields) != len(header):
                raise SchemaError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(fields)}"
                )
            parsed = []
            for name, f in zip(header, fields):
                try:
                    parsed.append(float(f))
                except ValueError:
                    raise SchemaError(
                        f"{path}: line {lineno}: column {name!r}: non-numeric field {f!r}"
                    ) from None
            rows.append(parsed)
    if header is None:
        raise SchemaError(f"{path}: missing header row")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    columns = {name: [row[j] for row in rows] for j, name in enumerate(header)}
    return ResultTable(path=path, meta=meta, columns=columns)


def finite_positive(xs, ys, errs=None):
    """Rows usable on logarithmic axes; drops the rest in lockstep."""
    keep = [
        i
        for i in range(len(xs))
        if math.isfinite(xs[i]) and math.isfinite(ys[i]) and ys[i] > 0
    ]
    fx = [xs[i] for i in keep]
    fy = [ys[i] for i in keep]
    fe = None if errs is None else [errs[i] for i in keep]
    return fx, fy, fe
