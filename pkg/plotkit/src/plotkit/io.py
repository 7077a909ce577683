"""Readers for the solver's CSV artifacts.

Field CSVs carry a ``#``-prefixed metadata block (``key: value`` per line),
one header row, then numeric rows.  Isentrope-curve CSVs use the same layout
with ``tau,e`` columns.
"""

from __future__ import annotations

import numpy as np

__all__ = ["FieldTable", "read_table", "MetadataMismatch"]


class MetadataMismatch(ValueError):
    """Input files do not describe the same problem."""


class FieldTable:
    """One parsed CSV: metadata dict plus named column arrays."""

    def __init__(self, meta, columns):
        self.meta = meta
        self.columns = columns

    def __getitem__(self, name):
        return self.columns[name]

    def __contains__(self, name):
        return name in self.columns

    @property
    def problem(self):
        return self.meta.get("problem", "")

    @property
    def time(self):
        return float(self.meta.get("t", "nan"))

    @property
    def dim(self):
        return int(self.meta.get("dim", "1"))

    def grid_shape(self):
        return tuple(int(s) for s in self.meta.get("cells", "0").split("x"))


def read_table(path) -> FieldTable:
    meta = {}
    names = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                meta[key.strip()] = val.strip()
            elif names is None:
                names = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])
    if names is None or not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    return FieldTable(meta, {name: data[:, k] for k, name in enumerate(names)})


def require_same_problem(tables):
    problems = {t.problem for t in tables}
    if len(problems) != 1:
        raise MetadataMismatch(f"inputs mix problems: {sorted(problems)}")
