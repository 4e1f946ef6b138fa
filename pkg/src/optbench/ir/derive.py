"""Output-schema derivation and static expression typing."""

from __future__ import annotations

from .. import mlfuncs
from ..errors import DivergentSchema, ShapeMismatch, ValidationError
from .exprs import Arith, ColumnRef, Compare, Expr, Literal, Logical, MLCall
from .nodes import Aggregate, Filter, Join, Limit, PlanNode, Project, Sample, Scan
from .schema import BOOL, FLOAT64, INT64, DType, Schema


def expr_dtype(expr: Expr, schema: Schema) -> DType:
    """Static dtype of an expression against an input schema."""
    if isinstance(expr, ColumnRef):
        return schema.dtype_of(expr.name)
    if isinstance(expr, Literal):
        return expr.dtype

    if isinstance(expr, Arith):
        lhs = expr_dtype(expr.lhs, schema)
        rhs = expr_dtype(expr.rhs, schema)
        if expr.op == "get":
            if lhs.base != "vector" or rhs != INT64:
                raise ShapeMismatch(f"get expects (vector, int64), got ({lhs}, {rhs})")
            return FLOAT64
        if not (lhs.is_numeric_scalar and rhs.is_numeric_scalar):
            raise ShapeMismatch(f"arith {expr.op!r} expects numeric scalars, got ({lhs}, {rhs})")
        if expr.op == "div":
            return FLOAT64
        return INT64 if lhs == INT64 and rhs == INT64 else FLOAT64

    if isinstance(expr, Compare):
        lhs = expr_dtype(expr.lhs, schema)
        rhs = expr_dtype(expr.rhs, schema)
        if lhs.is_numeric_scalar and rhs.is_numeric_scalar:
            return BOOL
        if lhs == rhs and lhs.base in ("string", "bool"):
            if expr.op in ("eq", "ne"):
                return BOOL
            raise ShapeMismatch(f"ordering compare on {lhs}")
        raise ShapeMismatch(f"cannot compare {lhs} with {rhs}")

    if isinstance(expr, Logical):
        for op in expr.operands:
            if expr_dtype(op, schema) != BOOL:
                raise ShapeMismatch(f"logical {expr.op!r} expects bool operands")
        return BOOL

    if isinstance(expr, MLCall):
        if expr.attrs.kernel_mode is not None and expr.fn != mlfuncs.MATRIX_MULTIPLY:
            raise ValidationError("kernel_mode is only valid on matrix_multiply calls")
        if (expr.attrs.tree_spec is not None) != (
            expr.fn in (mlfuncs.DECISION_TREE, mlfuncs.DECISION_FOREST)
        ):
            raise ValidationError("tree_spec present iff fn is decision_tree/decision_forest")
        arg_dtypes = [expr_dtype(a, schema) for a in expr.args]
        return mlfuncs.output_dtype(expr.fn, arg_dtypes, expr.attrs)

    raise ValidationError(f"unknown expression type {type(expr).__name__}")


def derive_schema(node: PlanNode) -> Schema:
    """Output schema of a plan node; memoized per node object."""
    cached = node.__dict__.get("_derived_schema")
    if cached is not None:
        return cached
    schema = _derive(node)
    object.__setattr__(node, "_derived_schema", schema)
    return schema


def _derive(node: PlanNode) -> Schema:
    if isinstance(node, Scan):
        return node.schema

    if isinstance(node, Filter):
        child = derive_schema(node.child)
        if expr_dtype(node.predicate, child) != BOOL:
            raise ShapeMismatch("filter predicate must be boolean")
        return child

    if isinstance(node, Project):
        child = derive_schema(node.child)
        return Schema(tuple((name, expr_dtype(e, child)) for e, name in node.exprs))

    if isinstance(node, Join):
        left = derive_schema(node.left)
        right = derive_schema(node.right)
        combined = left.concat(right)
        if node.condition is not None:
            if expr_dtype(node.condition, combined) != BOOL:
                raise ShapeMismatch("join condition must be boolean")
            normalized_equality_pairs(node.condition, left, right)
        return combined

    if isinstance(node, Aggregate):
        child = derive_schema(node.child)
        cols = []
        for i, key in enumerate(node.group_keys):
            name = key.name if isinstance(key, ColumnRef) else f"group_{i}"
            cols.append((name, expr_dtype(key, child)))
        for fn, e, name in node.aggregates:
            dt = expr_dtype(e, child)
            if fn == "count":
                cols.append((name, INT64))
            elif fn == "avg":
                _require_numeric(fn, dt)
                cols.append((name, FLOAT64))
            elif fn in ("sum", "min", "max"):
                _require_numeric(fn, dt)
                cols.append((name, dt))
            else:  # majority_vote keeps the voted value's type
                cols.append((name, dt))
        return Schema(tuple(cols))

    if isinstance(node, (Limit, Sample)):
        return derive_schema(node.child)

    raise ValidationError(f"unknown plan node {type(node).__name__}")


def _require_numeric(fn: str, dt: DType) -> None:
    if not dt.is_numeric_scalar:
        raise ShapeMismatch(f"aggregate {fn!r} needs a numeric scalar, got {dt}")


def equality_pairs(condition: Expr) -> list[tuple[str, str]]:
    """Split an inner-join condition into (left column, right column) pairs.

    Conditions must be a conjunction of column equality comparisons; the
    executor's hash join relies on this shape.
    """
    pairs = []
    stack = [condition]
    while stack:
        e = stack.pop()
        if isinstance(e, Logical) and e.op == "and":
            stack.extend(e.operands)
        elif isinstance(e, Compare) and e.op == "eq" and isinstance(e.lhs, ColumnRef) and isinstance(e.rhs, ColumnRef):
            pairs.append((e.lhs.name, e.rhs.name))
        else:
            raise DivergentSchema("inner join condition must be a conjunction of column equalities")
    return pairs


def normalized_equality_pairs(condition: Expr, left: Schema, right: Schema) -> list[tuple[str, str]]:
    """Equality pairs oriented as (left column, right column)."""
    out = []
    for a, b in equality_pairs(condition):
        if a in left and b in right:
            out.append((a, b))
        elif b in left and a in right:
            out.append((b, a))
        else:
            raise DivergentSchema(f"join condition {a}={b} does not split across inputs")
    return out


def validate_plan(plan: PlanNode) -> Schema:
    """Full-tree validation; returns the root schema or raises."""
    for _, node in _walk(plan):
        derive_schema(node)
    return derive_schema(plan)


def _walk(plan: PlanNode):
    stack = [((), plan)]
    while stack:
        path, node = stack.pop()
        yield path, node
        stack.extend((path + (i,), c) for i, c in enumerate(node.children))
