"""Column dtypes and relation schemas."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import UnresolvedColumn, ValidationError

_SCALAR_BASES = ("int64", "float64", "string", "bool")


@dataclass(frozen=True)
class DType:
    """Cell type: a scalar, a fixed-dim float vector, or a fixed-shape float matrix."""

    base: str
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        if self.base in _SCALAR_BASES:
            if self.dims:
                raise ValidationError(f"scalar dtype {self.base} carries dims {self.dims}")
        elif self.base == "vector":
            if len(self.dims) != 1 or self.dims[0] <= 0:
                raise ValidationError(f"vector dtype needs one positive dim, got {self.dims}")
        elif self.base == "matrix":
            if len(self.dims) != 2 or any(d <= 0 for d in self.dims):
                raise ValidationError(f"matrix dtype needs two positive dims, got {self.dims}")
        else:
            raise ValidationError(f"unknown dtype base {self.base!r}")

    @property
    def is_numeric_scalar(self) -> bool:
        return self.base in ("int64", "float64")

    @property
    def width(self) -> int:
        """Number of float features this cell contributes when concatenated."""
        if self.is_numeric_scalar:
            return 1
        if self.base == "vector":
            return self.dims[0]
        raise ValidationError(f"{self} is not a feature dtype")

    def __str__(self) -> str:
        if not self.dims:
            return self.base
        return f"{self.base}({','.join(str(d) for d in self.dims)})"

    @staticmethod
    def parse(text: str) -> "DType":
        if "(" not in text:
            return DType(text)
        base, _, rest = text.partition("(")
        dims = tuple(int(d) for d in rest.rstrip(")").split(","))
        return DType(base, dims)


INT64 = DType("int64")
FLOAT64 = DType("float64")
STRING = DType("string")
BOOL = DType("bool")


def vector(dim: int) -> DType:
    return DType("vector", (dim,))


def matrix(rows: int, cols: int) -> DType:
    return DType("matrix", (rows, cols))


@dataclass(frozen=True)
class Schema:
    """Ordered, uniquely named columns."""

    columns: tuple[tuple[str, DType], ...]
    _index: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = [n for n, _ in self.columns]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValidationError(f"duplicate column names: {dupes}")
        object.__setattr__(self, "_index", {n: i for i, (n, _) in enumerate(self.columns)})

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.columns)

    def __len__(self) -> int:
        return len(self.columns)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def dtype_of(self, name: str) -> DType:
        try:
            return self.columns[self._index[name]][1]
        except KeyError:
            raise UnresolvedColumn(name, self.names) from None

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnresolvedColumn(name, self.names) from None

    def concat(self, other: "Schema") -> "Schema":
        return Schema(self.columns + other.columns)


def schema_of(*cols: tuple[str, DType]) -> Schema:
    return Schema(tuple(cols))
