"""Expression trees: column refs, literals, scalar ops, and ML operator calls.

Expressions are immutable values; rewrites construct fresh trees. Literal
vector/matrix payloads are stored as nested tuples so that structural
equality, hashing, and serialization stay canonical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

from ..errors import ValidationError
from .schema import BOOL, FLOAT64, INT64, STRING, DType

ARITH_OPS = ("add", "sub", "mul", "div", "get")
COMPARE_OPS = ("eq", "ne", "lt", "le", "gt", "ge")
LOGICAL_OPS = ("and", "or", "not")


@dataclass(frozen=True)
class TreeNode:
    """One node of a decision tree; feature == -1 marks a leaf carrying `value`."""

    feature: int
    threshold: float
    left: int
    right: int
    value: float

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass(frozen=True)
class TreeSpec:
    nodes: tuple[TreeNode, ...]

    def __post_init__(self):
        if not self.nodes:
            raise ValidationError("tree has no nodes")

    @property
    def internal_count(self) -> int:
        return sum(1 for n in self.nodes if not n.is_leaf)


@dataclass(frozen=True)
class ForestSpec:
    trees: tuple[TreeSpec, ...]
    aggregation: str = "mean"  # mean | majority | sum

    def __post_init__(self):
        if self.aggregation not in ("mean", "majority", "sum"):
            raise ValidationError(f"unknown forest aggregation {self.aggregation!r}")
        if not self.trees:
            raise ValidationError("forest has no trees")


@dataclass(frozen=True)
class LayerSpec:
    """One fused-inference layer: x -> activation(x @ weights + bias)."""

    weights: tuple[tuple[float, ...], ...]
    bias: tuple[float, ...]
    activation: str = "identity"

    def __post_init__(self):
        if self.activation not in ("identity", "relu", "sigmoid", "softmax"):
            raise ValidationError(f"unsupported layer activation {self.activation!r}")
        if len(self.bias) != len(self.weights[0]):
            raise ValidationError("layer bias dim does not match weight cols")

    @property
    def in_dim(self) -> int:
        return len(self.weights)

    @property
    def out_dim(self) -> int:
        return len(self.weights[0])


@dataclass(frozen=True)
class MLAttrs:
    """Static annotations on an ML operator call."""

    model_id: Optional[str] = None
    weight_shape: Optional[tuple[int, int]] = None
    bias_shape: Optional[int] = None
    kernel_mode: Optional[str] = None  # dense | sparse; matrix_multiply only
    layer_spec: Optional[tuple[LayerSpec, ...]] = None
    tree_spec: Optional[Union[TreeSpec, ForestSpec]] = None
    filter_spec: Optional[tuple[int, int, int]] = None  # (count, height, width)
    im2col: Optional[tuple[int, int]] = None  # matmul lowered from conv2d
    metric: Optional[str] = None  # distance: l1 | l2
    out_dim: Optional[int] = None  # one_hot_encoder vocabulary size
    tree_index_from_arg: bool = False

    def __post_init__(self):
        if self.kernel_mode not in (None, "dense", "sparse"):
            raise ValidationError(f"unknown kernel mode {self.kernel_mode!r}")
        if self.metric not in (None, "l1", "l2"):
            raise ValidationError(f"unknown distance metric {self.metric!r}")

    def with_(self, **kw) -> "MLAttrs":
        return replace(self, **kw)


EMPTY_ATTRS = MLAttrs()


class Expr:
    """Marker base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class ColumnRef(Expr):
    name: str


@dataclass(frozen=True)
class Literal(Expr):
    value: object
    dtype: DType


@dataclass(frozen=True)
class Arith(Expr):
    op: str
    lhs: Expr
    rhs: Expr

    def __post_init__(self):
        if self.op not in ARITH_OPS:
            raise ValidationError(f"unknown arith op {self.op!r}")


@dataclass(frozen=True)
class Compare(Expr):
    op: str
    lhs: Expr
    rhs: Expr

    def __post_init__(self):
        if self.op not in COMPARE_OPS:
            raise ValidationError(f"unknown compare op {self.op!r}")


@dataclass(frozen=True)
class Logical(Expr):
    op: str
    operands: tuple[Expr, ...]

    def __post_init__(self):
        if self.op not in LOGICAL_OPS:
            raise ValidationError(f"unknown logical op {self.op!r}")
        if self.op == "not" and len(self.operands) != 1:
            raise ValidationError("'not' takes exactly one operand")
        if self.op != "not" and len(self.operands) < 2:
            raise ValidationError(f"'{self.op}' needs at least two operands")


@dataclass(frozen=True)
class MLCall(Expr):
    fn: str
    args: tuple[Expr, ...]
    attrs: MLAttrs = field(default=EMPTY_ATTRS)


# --- construction helpers ---

def col(name: str) -> ColumnRef:
    return ColumnRef(name)


def lit(value, dtype: Optional[DType] = None) -> Literal:
    """Wrap a python value; infers the dtype unless given explicitly."""
    if dtype is not None:
        return Literal(_canon_value(value, dtype), dtype)
    if isinstance(value, bool):
        return Literal(value, BOOL)
    if isinstance(value, int):
        return Literal(value, INT64)
    if isinstance(value, float):
        return Literal(value, FLOAT64)
    if isinstance(value, str):
        return Literal(value, STRING)
    if isinstance(value, (tuple, list)):
        seq = tuple(value)
        if seq and isinstance(seq[0], (tuple, list)):
            rows = tuple(tuple(float(x) for x in r) for r in seq)
            if len({len(r) for r in rows}) != 1:
                raise ValidationError("ragged matrix literal")
            return Literal(rows, DType("matrix", (len(rows), len(rows[0]))))
        vec = tuple(float(x) for x in seq)
        if not vec:
            raise ValidationError("empty vector literal")
        return Literal(vec, DType("vector", (len(vec),)))
    raise ValidationError(f"cannot infer literal dtype for {type(value).__name__}")


def _canon_value(value, dtype: DType):
    if dtype.base == "vector":
        return tuple(float(x) for x in value)
    if dtype.base == "matrix":
        return tuple(tuple(float(x) for x in r) for r in value)
    if dtype.base == "float64":
        return float(value)
    if dtype.base == "int64":
        return int(value)
    return value


def and_(*operands: Expr) -> Expr:
    return operands[0] if len(operands) == 1 else Logical("and", tuple(operands))


def walk(expr: Expr):
    """Yield (path, subexpression) preorder; path is a tuple of child indices."""
    stack = [((), expr)]
    while stack:
        path, e = stack.pop(0)
        yield path, e
        stack[0:0] = [(path + (i,), c) for i, c in enumerate(children_of(e))]


def children_of(expr: Expr) -> tuple[Expr, ...]:
    if isinstance(expr, (Arith, Compare)):
        return (expr.lhs, expr.rhs)
    if isinstance(expr, Logical):
        return expr.operands
    if isinstance(expr, MLCall):
        return expr.args
    return ()


def replace_child(expr: Expr, index: int, child: Expr) -> Expr:
    if isinstance(expr, (Arith, Compare)):
        return replace(expr, lhs=child) if index == 0 else replace(expr, rhs=child)
    if isinstance(expr, Logical):
        ops = list(expr.operands)
        ops[index] = child
        return replace(expr, operands=tuple(ops))
    if isinstance(expr, MLCall):
        args = list(expr.args)
        args[index] = child
        return replace(expr, args=tuple(args))
    raise ValidationError(f"{type(expr).__name__} has no children")


def replace_at(expr: Expr, path: tuple[int, ...], replacement: Expr) -> Expr:
    if not path:
        return replacement
    kids = children_of(expr)
    return replace_child(expr, path[0], replace_at(kids[path[0]], path[1:], replacement))


def subexpr_at(expr: Expr, path: tuple[int, ...]) -> Expr:
    for i in path:
        expr = children_of(expr)[i]
    return expr


def free_columns(expr: Expr) -> frozenset[str]:
    return frozenset(e.name for _, e in walk(expr) if isinstance(e, ColumnRef))
