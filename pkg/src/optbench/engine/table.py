"""In-memory columnar tables and the table/model catalog."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import DataTypeError, UnknownTable, ValidationError
from ..ir.schema import DType, Schema
from ..kernels.models import ModelStore


def numpy_dtype_for(dt: DType):
    return {"int64": np.int64, "float64": np.float64, "bool": np.bool_}.get(dt.base, object)


def empty_column(dt: DType, n: int) -> np.ndarray:
    if dt.base == "vector":
        return np.zeros((n, dt.dims[0]), dtype=np.float64)
    if dt.base == "matrix":
        return np.zeros((n,) + dt.dims, dtype=np.float64)
    return np.zeros(n, dtype=numpy_dtype_for(dt))


def _check_column(name: str, dt: DType, arr: np.ndarray, n: int) -> np.ndarray:
    if dt.base == "vector":
        expected = (n, dt.dims[0])
    elif dt.base == "matrix":
        expected = (n,) + dt.dims
    else:
        expected = (n,)
    if tuple(arr.shape) != expected:
        raise DataTypeError(0, name, f"shape {arr.shape} != {expected}")
    if dt.base in ("vector", "matrix", "float64"):
        return arr.astype(np.float64, copy=False)
    if dt.base == "int64":
        return arr.astype(np.int64, copy=False)
    if dt.base == "bool":
        return arr.astype(np.bool_, copy=False)
    return arr if arr.dtype == object else arr.astype(object)


class Table:
    """Named relation with typed column arrays (vector/matrix cells supported)."""

    def __init__(self, name: str, schema: Schema, columns: dict[str, np.ndarray]):
        if set(columns) != set(schema.names):
            raise ValidationError(f"table {name!r}: columns do not match schema")
        lengths = {c.shape[0] for c in columns.values()}
        if len(lengths) > 1:
            raise ValidationError(f"table {name!r}: ragged columns {lengths}")
        self.name = name
        self.schema = schema
        self.n_rows = lengths.pop() if lengths else 0
        self.columns = {n: _check_column(n, dt, columns[n], self.n_rows) for n, dt in schema.columns}

    @classmethod
    def from_rows(cls, name: str, schema: Schema, rows) -> "Table":
        n = len(rows)
        cols = {cn: empty_column(dt, n) for cn, dt in schema.columns}
        for i, row in enumerate(rows):
            if len(row) != len(schema):
                raise DataTypeError(i, "*", f"row width {len(row)} != {len(schema)}")
            for (cn, _), v in zip(schema.columns, row):
                cols[cn][i] = v
        return cls(name, schema, cols)

    def rows(self):
        for i in range(self.n_rows):
            yield tuple(self.columns[n][i] for n in self.schema.names)


class Catalog:
    """Loaded tables plus per-column statistics gathered at load time."""

    def __init__(self, models: ModelStore | None = None):
        self.tables: dict[str, Table] = {}
        self.models = models or ModelStore()
        self.distinct_counts: dict[tuple[str, str], int] = {}
        self.epoch = 0

    def add_table(self, table: Table) -> None:
        self.tables[table.name] = table
        for cn, dt in table.schema.columns:
            if dt.base in ("int64", "string", "bool"):
                col = table.columns[cn]
                self.distinct_counts[(table.name, cn)] = len(set(col.tolist()))
            elif dt.base == "float64":
                self.distinct_counts[(table.name, cn)] = len(np.unique(table.columns[cn]))
        self.epoch += 1

    def get(self, name: str) -> Table:
        try:
            return self.tables[name]
        except KeyError:
            raise UnknownTable(name) from None

    def row_count(self, name: str) -> int:
        return self.get(name).n_rows

    def distinct(self, table: str, column: str) -> int | None:
        return self.distinct_counts.get((table, column))

    def is_unique(self, table: str, column: str) -> bool:
        d = self.distinct(table, column)
        return d is not None and table in self.tables and d == self.tables[table].n_rows

    # --- CSV + sidecar loading ---

    def load_csv(self, csv_path: str | Path, sidecar_path: str | Path | None = None) -> Table:
        """Load one table from CSV with a JSON schema sidecar.

        Vector/matrix cells are JSON arrays embedded in their CSV field.
        """
        csv_path = Path(csv_path)
        sidecar = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".schema.json")
        meta = json.loads(sidecar.read_text())
        schema = Schema(tuple((c["name"], DType.parse(c["dtype"])) for c in meta["columns"]))
        name = meta.get("name", csv_path.stem)
        rows = []
        with open(csv_path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != list(schema.names):
                raise ValidationError(f"{csv_path}: header does not match sidecar schema")
            for raw in reader:
                row = []
                for val, (_, dt) in zip(raw, schema.columns):
                    if dt.base == "int64":
                        row.append(int(val))
                    elif dt.base == "float64":
                        row.append(float(val))
                    elif dt.base == "bool":
                        row.append(val.lower() in ("1", "true"))
                    elif dt.base in ("vector", "matrix"):
                        row.append(np.asarray(json.loads(val), dtype=np.float64))
                    else:
                        row.append(val)
                rows.append(row)
        table = Table.from_rows(name, schema, rows)
        self.add_table(table)
        return table

    def save_csv(self, name: str, csv_path: str | Path) -> None:
        table = self.get(name)
        csv_path = Path(csv_path)
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(table.schema.names)
            for row in table.rows():
                out = []
                for v, (_, dt) in zip(row, table.schema.columns):
                    if dt.base in ("vector", "matrix"):
                        out.append(json.dumps(np.asarray(v).tolist()))
                    else:
                        out.append(v)
                writer.writerow(out)
        sidecar = {
            "name": name,
            "columns": [{"name": n, "dtype": str(dt)} for n, dt in table.schema.columns],
        }
        csv_path.with_suffix(".schema.json").write_text(json.dumps(sidecar, indent=2))
