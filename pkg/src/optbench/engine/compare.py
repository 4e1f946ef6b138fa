"""Multiset result comparison with numeric tolerance."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import SchemaMismatch
from .executor import ResultSet


@dataclass
class EquivalenceReport:
    equivalent: bool
    reason: str = ""
    first_divergence: Optional[dict] = field(default=None)

    def __bool__(self):
        return self.equivalent


def _sort_key(rs: ResultSet, key_columns, names):
    key_cols = [rs.columns[k] for k in key_columns]
    rest = [rs.columns[n] for n in names if n not in key_columns and rs.columns[n].ndim == 1]
    arrays = key_cols + rest

    def keyfn(i):
        out = []
        for a in arrays:
            v = a[i]
            if isinstance(v, (np.floating, float)):
                out.append(round(float(v), 6))
            elif isinstance(v, np.generic):
                out.append(v.item())
            else:
                out.append(v)
        return tuple(out)

    return sorted(range(rs.n_rows), key=keyfn)


def _values_close(a, b, tol: float) -> bool:
    if isinstance(a, str) or isinstance(b, str):
        return a == b
    av, bv = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    denom = np.maximum(np.abs(av), np.abs(bv))
    diff = np.abs(av - bv)
    return bool(np.all((diff <= tol) | (diff <= tol * denom)))


def compare_results(a: ResultSet, b: ResultSet, key_columns=(), tol: float = 1e-6) -> EquivalenceReport:
    """Compare two results as multisets of rows.

    Rows are aligned by sorting on `key_columns` (falling back to every
    scalar column), then matched pairwise with relative tolerance `tol` on
    numeric values. Column order is ignored; column names must agree.
    """
    if set(a.schema.names) != set(b.schema.names):
        raise SchemaMismatch(
            f"column sets differ: {sorted(a.schema.names)} vs {sorted(b.schema.names)}"
        )
    for name in a.schema.names:
        if a.schema.dtype_of(name).base != b.schema.dtype_of(name).base:
            raise SchemaMismatch(f"column {name!r} dtype differs")
    if a.n_rows != b.n_rows:
        return EquivalenceReport(False, f"row counts differ: {a.n_rows} vs {b.n_rows}")

    names = a.schema.names
    key_columns = [k for k in key_columns if k in a.schema.names]
    ia = _sort_key(a, key_columns, names)
    ib = _sort_key(b, key_columns, names)
    for ra, rb in zip(ia, ib):
        for name in names:
            va, vb = a.columns[name][ra], b.columns[name][rb]
            if not _values_close(va, vb, tol):
                key = {k: a.columns[k][ra] for k in (key_columns or names[:1])}
                return EquivalenceReport(
                    False,
                    f"column {name!r} diverges at key {key}",
                    {"key": {k: _plain(v) for k, v in key.items()}, "column": name,
                     "left": _plain(va), "right": _plain(vb)},
                )
    return EquivalenceReport(True)


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v
