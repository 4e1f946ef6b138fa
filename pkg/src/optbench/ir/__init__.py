"""Logical plan IR: schemas, expressions, plan nodes, serde, hashing."""

from .derive import (
    derive_schema,
    equality_pairs,
    expr_dtype,
    normalized_equality_pairs,
    validate_plan,
)
from .exprs import (
    Arith,
    ColumnRef,
    Compare,
    EMPTY_ATTRS,
    Expr,
    ForestSpec,
    LayerSpec,
    Literal,
    Logical,
    MLAttrs,
    MLCall,
    TreeNode,
    TreeSpec,
    and_,
    children_of,
    col,
    free_columns,
    lit,
    replace_at,
    subexpr_at,
    walk,
)
from .hashing import PlanHash, canonical_hash, expr_hash
from .nodes import (
    AGG_FNS,
    Aggregate,
    Filter,
    Join,
    Limit,
    NodePath,
    PlanNode,
    Project,
    Sample,
    Scan,
    clone,
    node_at,
    node_exprs,
    replace_node_at,
    walk_plan,
    with_node_exprs,
)
from .schema import BOOL, FLOAT64, INT64, STRING, DType, Schema, matrix, schema_of, vector
from .serde import (
    PLAN_FORMAT,
    attrs_from_doc,
    attrs_to_doc,
    expr_from_doc,
    expr_to_doc,
    node_from_doc,
    node_to_doc,
    parse_plan,
    plan_from_doc,
    plan_to_doc,
    schema_from_doc,
    schema_to_doc,
    serialize_plan,
)

__all__ = [name for name in dir() if not name.startswith("_")]
