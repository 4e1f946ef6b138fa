"""Baseline cardinality and selectivity estimation.

Classical defaults, pinned so fixtures stay stable: equality selects 0.1,
range predicates 1/3, conjunction multiplies, disjunction is a capped sum.
Inner-join estimates divide the input product by the larger distinct count
of the join keys (distinct counts come from exact catalog scans at load).
"""

from __future__ import annotations

from ..engine.table import Catalog
from ..ir.exprs import ColumnRef, Compare, Expr, Logical
from ..ir.nodes import Aggregate, Filter, Join, Limit, PlanNode, Project, Sample, Scan

EQUALITY_SELECTIVITY = 0.1
RANGE_SELECTIVITY = 1.0 / 3.0
DEFAULT_SELECTIVITY = 1.0 / 3.0
DEFAULT_DISTINCT_FRACTION = 0.1  # distinct estimate for columns with unknown provenance


def predicate_selectivity(expr: Expr) -> float:
    if isinstance(expr, Compare):
        if expr.op == "eq":
            return EQUALITY_SELECTIVITY
        if expr.op == "ne":
            return 1.0 - EQUALITY_SELECTIVITY
        return RANGE_SELECTIVITY
    if isinstance(expr, Logical):
        parts = [predicate_selectivity(o) for o in expr.operands]
        if expr.op == "and":
            out = 1.0
            for p in parts:
                out *= p
            return out
        if expr.op == "or":
            return min(1.0, sum(parts))
        return max(0.0, 1.0 - parts[0])
    return DEFAULT_SELECTIVITY


def column_provenance(node: PlanNode) -> dict[str, tuple[str, str]]:
    """Map output columns to (base table, base column) for passthrough columns."""
    if isinstance(node, Scan):
        if node.inline_rows is not None:
            return {}
        return {n: (node.table, n) for n in node.schema.names}
    if isinstance(node, Project):
        child = column_provenance(node.child)
        out = {}
        for e, name in node.exprs:
            if isinstance(e, ColumnRef) and e.name in child:
                out[name] = child[e.name]
        return out
    if isinstance(node, Join):
        out = column_provenance(node.left)
        out.update(column_provenance(node.right))
        return out
    if isinstance(node, Aggregate):
        child = column_provenance(node.child)
        out = {}
        for i, k in enumerate(node.group_keys):
            if isinstance(k, ColumnRef) and k.name in child:
                out[k.name] = child[k.name]
        return out
    if isinstance(node, (Filter, Limit, Sample)):
        return column_provenance(node.child)
    return {}


def _distinct_estimate(catalog: Catalog, node: PlanNode, column: str, rows: float) -> float:
    prov = column_provenance(node).get(column)
    if prov is not None:
        d = catalog.distinct(*prov)
        if d is not None:
            return float(max(1, d))
    return max(1.0, rows * DEFAULT_DISTINCT_FRACTION)


def estimate_cardinality(node: PlanNode, catalog: Catalog) -> float:
    """Estimated output rows of one plan node (deterministic)."""
    if isinstance(node, Scan):
        if node.inline_rows is not None:
            return float(len(node.inline_rows))
        return float(catalog.row_count(node.table))

    if isinstance(node, Filter):
        return estimate_cardinality(node.child, catalog) * predicate_selectivity(node.predicate)

    if isinstance(node, Project):
        return estimate_cardinality(node.child, catalog)

    if isinstance(node, Join):
        left = estimate_cardinality(node.left, catalog)
        right = estimate_cardinality(node.right, catalog)
        product = left * right
        if node.join_type == "cross" or node.condition is None:
            return product
        from ..ir.derive import equality_pairs

        denom = 1.0
        for a, b in equality_pairs(node.condition):
            da = _distinct_estimate(catalog, node.left, a, left) if _in_schema(node.left, a) else None
            db = _distinct_estimate(catalog, node.right, b, right) if _in_schema(node.right, b) else None
            if da is None or db is None:  # condition written right=left
                da = _distinct_estimate(catalog, node.left, b, left)
                db = _distinct_estimate(catalog, node.right, a, right)
            denom *= max(da, db)
        return product / max(denom, 1.0)

    if isinstance(node, Aggregate):
        child = estimate_cardinality(node.child, catalog)
        if not node.group_keys:
            return 1.0
        groups = 1.0
        for k in node.group_keys:
            if isinstance(k, ColumnRef):
                groups *= _distinct_estimate(catalog, node.child, k.name, child)
            else:
                groups *= max(1.0, child * DEFAULT_DISTINCT_FRACTION)
        return min(child, groups)

    if isinstance(node, (Limit, Sample)):
        return min(float(node.n), estimate_cardinality(node.child, catalog))

    raise TypeError(f"unknown plan node {type(node).__name__}")


def _in_schema(node: PlanNode, column: str) -> bool:
    from ..ir.derive import derive_schema

    return column in derive_schema(node)
