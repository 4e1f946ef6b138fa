"""Plan document serialization (format `optbench-plan/1`).

The document is a JSON object tree with a `kind` discriminator per node and
per expression; Scan is the only node that embeds a schema (and, for
constant relations, rows). See docs/plan-format.md for the field table.
"""

from __future__ import annotations

import json

from ..errors import ParseError, ValidationError
from .derive import validate_plan
from .exprs import (
    Arith,
    ColumnRef,
    Compare,
    Expr,
    ForestSpec,
    LayerSpec,
    Literal,
    Logical,
    MLAttrs,
    MLCall,
    TreeNode,
    TreeSpec,
)
from .nodes import Aggregate, Filter, Join, Limit, PlanNode, Project, Sample, Scan
from .schema import DType, Schema

PLAN_FORMAT = "optbench-plan/1"


# --- to document ---

def schema_to_doc(schema: Schema) -> list:
    return [{"name": n, "dtype": str(dt)} for n, dt in schema.columns]


def schema_from_doc(doc, loc: str) -> Schema:
    try:
        return Schema(tuple((c["name"], DType.parse(c["dtype"])) for c in doc))
    except (KeyError, TypeError, ValidationError) as e:
        raise ParseError(loc, f"bad schema: {e}") from e


def attrs_to_doc(attrs: MLAttrs) -> dict:
    doc = {}
    if attrs.model_id is not None:
        doc["model_id"] = attrs.model_id
    if attrs.weight_shape is not None:
        doc["weight_shape"] = list(attrs.weight_shape)
    if attrs.bias_shape is not None:
        doc["bias_shape"] = attrs.bias_shape
    if attrs.kernel_mode is not None:
        doc["kernel_mode"] = attrs.kernel_mode
    if attrs.layer_spec is not None:
        doc["layer_spec"] = [
            {"weights": [list(r) for r in l.weights], "bias": list(l.bias), "activation": l.activation}
            for l in attrs.layer_spec
        ]
    if attrs.tree_spec is not None:
        doc["tree_spec"] = _tree_spec_to_doc(attrs.tree_spec)
    if attrs.filter_spec is not None:
        doc["filter_spec"] = list(attrs.filter_spec)
    if attrs.im2col is not None:
        doc["im2col"] = list(attrs.im2col)
    if attrs.metric is not None:
        doc["metric"] = attrs.metric
    if attrs.out_dim is not None:
        doc["out_dim"] = attrs.out_dim
    if attrs.tree_index_from_arg:
        doc["tree_index_from_arg"] = True
    return doc


def _tree_spec_to_doc(spec) -> dict:
    if isinstance(spec, TreeSpec):
        return {"type": "tree", "nodes": [[n.feature, n.threshold, n.left, n.right, n.value] for n in spec.nodes]}
    return {
        "type": "forest",
        "aggregation": spec.aggregation,
        "trees": [[[n.feature, n.threshold, n.left, n.right, n.value] for n in t.nodes] for t in spec.trees],
    }


def _tree_spec_from_doc(doc, loc: str):
    try:
        if doc["type"] == "tree":
            return TreeSpec(tuple(TreeNode(int(f), float(t), int(l), int(r), float(v)) for f, t, l, r, v in doc["nodes"]))
        if doc["type"] == "forest":
            trees = tuple(
                TreeSpec(tuple(TreeNode(int(f), float(t), int(l), int(r), float(v)) for f, t, l, r, v in nodes))
                for nodes in doc["trees"]
            )
            return ForestSpec(trees, doc.get("aggregation", "mean"))
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise ParseError(loc, f"bad tree_spec: {e}") from e
    raise ParseError(loc, f"unknown tree_spec type {doc.get('type')!r}")


def attrs_from_doc(doc: dict, loc: str) -> MLAttrs:
    try:
        layer_spec = None
        if "layer_spec" in doc:
            layer_spec = tuple(
                LayerSpec(
                    weights=tuple(tuple(float(x) for x in r) for r in l["weights"]),
                    bias=tuple(float(x) for x in l["bias"]),
                    activation=l.get("activation", "identity"),
                )
                for l in doc["layer_spec"]
            )
        return MLAttrs(
            model_id=doc.get("model_id"),
            weight_shape=tuple(doc["weight_shape"]) if "weight_shape" in doc else None,
            bias_shape=doc.get("bias_shape"),
            kernel_mode=doc.get("kernel_mode"),
            layer_spec=layer_spec,
            tree_spec=_tree_spec_from_doc(doc["tree_spec"], loc) if "tree_spec" in doc else None,
            filter_spec=tuple(doc["filter_spec"]) if "filter_spec" in doc else None,
            im2col=tuple(doc["im2col"]) if "im2col" in doc else None,
            metric=doc.get("metric"),
            out_dim=doc.get("out_dim"),
            tree_index_from_arg=bool(doc.get("tree_index_from_arg", False)),
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise ParseError(loc, f"bad attrs: {e}") from e


def expr_to_doc(expr: Expr) -> dict:
    if isinstance(expr, ColumnRef):
        return {"kind": "col", "name": expr.name}
    if isinstance(expr, Literal):
        value = expr.value
        if expr.dtype.base == "vector":
            value = list(value)
        elif expr.dtype.base == "matrix":
            value = [list(r) for r in value]
        return {"kind": "lit", "dtype": str(expr.dtype), "value": value}
    if isinstance(expr, Arith):
        return {"kind": "arith", "op": expr.op, "lhs": expr_to_doc(expr.lhs), "rhs": expr_to_doc(expr.rhs)}
    if isinstance(expr, Compare):
        return {"kind": "compare", "op": expr.op, "lhs": expr_to_doc(expr.lhs), "rhs": expr_to_doc(expr.rhs)}
    if isinstance(expr, Logical):
        return {"kind": "logical", "op": expr.op, "operands": [expr_to_doc(o) for o in expr.operands]}
    if isinstance(expr, MLCall):
        return {"kind": "ml", "fn": expr.fn, "args": [expr_to_doc(a) for a in expr.args], "attrs": attrs_to_doc(expr.attrs)}
    raise ValidationError(f"cannot serialize expression {type(expr).__name__}")


def expr_from_doc(doc, loc: str) -> Expr:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError(loc, "expression must be an object with a 'kind'")
    kind = doc["kind"]
    try:
        if kind == "col":
            return ColumnRef(doc["name"])
        if kind == "lit":
            dtype = DType.parse(doc["dtype"])
            value = doc["value"]
            if dtype.base == "vector":
                value = tuple(float(x) for x in value)
            elif dtype.base == "matrix":
                value = tuple(tuple(float(x) for x in r) for r in value)
            elif dtype.base == "float64":
                value = float(value)
            elif dtype.base == "int64":
                value = int(value)
            elif dtype.base == "bool":
                value = bool(value)
            return Literal(value, dtype)
        if kind == "arith":
            return Arith(doc["op"], expr_from_doc(doc["lhs"], loc + ".lhs"), expr_from_doc(doc["rhs"], loc + ".rhs"))
        if kind == "compare":
            return Compare(doc["op"], expr_from_doc(doc["lhs"], loc + ".lhs"), expr_from_doc(doc["rhs"], loc + ".rhs"))
        if kind == "logical":
            return Logical(doc["op"], tuple(expr_from_doc(o, f"{loc}.operands[{i}]") for i, o in enumerate(doc["operands"])))
        if kind == "ml":
            return MLCall(
                doc["fn"],
                tuple(expr_from_doc(a, f"{loc}.args[{i}]") for i, a in enumerate(doc["args"])),
                attrs_from_doc(doc.get("attrs", {}), loc + ".attrs"),
            )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise ParseError(loc, str(e)) from e
    raise ParseError(loc, f"unknown expression kind {kind!r}")


def node_to_doc(node: PlanNode) -> dict:
    if isinstance(node, Scan):
        doc = {"kind": "scan", "table": node.table, "schema": schema_to_doc(node.schema)}
        if node.inline_rows is not None:
            doc["rows"] = [_row_to_doc(r, node.schema) for r in node.inline_rows]
        return doc
    if isinstance(node, Filter):
        return {"kind": "filter", "predicate": expr_to_doc(node.predicate), "child": node_to_doc(node.child)}
    if isinstance(node, Project):
        return {
            "kind": "project",
            "exprs": [{"expr": expr_to_doc(e), "name": n} for e, n in node.exprs],
            "child": node_to_doc(node.child),
        }
    if isinstance(node, Join):
        doc = {"kind": "join", "join_type": node.join_type, "left": node_to_doc(node.left), "right": node_to_doc(node.right)}
        doc["condition"] = expr_to_doc(node.condition) if node.condition is not None else None
        return doc
    if isinstance(node, Aggregate):
        return {
            "kind": "aggregate",
            "group_keys": [expr_to_doc(k) for k in node.group_keys],
            "aggregates": [{"fn": fn, "expr": expr_to_doc(e), "name": n} for fn, e, n in node.aggregates],
            "child": node_to_doc(node.child),
        }
    if isinstance(node, Limit):
        return {"kind": "limit", "n": node.n, "child": node_to_doc(node.child)}
    if isinstance(node, Sample):
        return {"kind": "sample", "n": node.n, "seed": node.seed, "child": node_to_doc(node.child)}
    raise ValidationError(f"cannot serialize node {type(node).__name__}")


def _row_to_doc(row, schema: Schema):
    out = []
    for v, (_, dt) in zip(row, schema.columns):
        if dt.base == "vector":
            out.append(list(v))
        elif dt.base == "matrix":
            out.append([list(r) for r in v])
        else:
            out.append(v)
    return out


def _row_from_doc(row, schema: Schema):
    out = []
    for v, (_, dt) in zip(row, schema.columns):
        if dt.base == "vector":
            out.append(tuple(float(x) for x in v))
        elif dt.base == "matrix":
            out.append(tuple(tuple(float(x) for x in r) for r in v))
        elif dt.base == "float64":
            out.append(float(v))
        elif dt.base == "int64":
            out.append(int(v))
        else:
            out.append(v)
    return tuple(out)


def node_from_doc(doc, loc: str) -> PlanNode:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError(loc, "plan node must be an object with a 'kind'")
    kind = doc["kind"]
    try:
        if kind == "scan":
            schema = schema_from_doc(doc["schema"], loc + ".schema")
            rows = None
            if doc.get("rows") is not None:
                rows = tuple(_row_from_doc(r, schema) for r in doc["rows"])
            return Scan(doc["table"], schema, rows)
        if kind == "filter":
            return Filter(node_from_doc(doc["child"], loc + ".child"), expr_from_doc(doc["predicate"], loc + ".predicate"))
        if kind == "project":
            return Project(
                node_from_doc(doc["child"], loc + ".child"),
                tuple((expr_from_doc(p["expr"], f"{loc}.exprs[{i}]"), p["name"]) for i, p in enumerate(doc["exprs"])),
            )
        if kind == "join":
            cond = doc.get("condition")
            return Join(
                node_from_doc(doc["left"], loc + ".left"),
                node_from_doc(doc["right"], loc + ".right"),
                doc["join_type"],
                expr_from_doc(cond, loc + ".condition") if cond is not None else None,
            )
        if kind == "aggregate":
            return Aggregate(
                node_from_doc(doc["child"], loc + ".child"),
                tuple(expr_from_doc(k, f"{loc}.group_keys[{i}]") for i, k in enumerate(doc["group_keys"])),
                tuple(
                    (a["fn"], expr_from_doc(a["expr"], f"{loc}.aggregates[{i}]"), a["name"])
                    for i, a in enumerate(doc["aggregates"])
                ),
            )
        if kind == "limit":
            return Limit(node_from_doc(doc["child"], loc + ".child"), int(doc["n"]))
        if kind == "sample":
            return Sample(node_from_doc(doc["child"], loc + ".child"), int(doc["n"]), int(doc.get("seed", 0)))
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise ParseError(loc, str(e)) from e
    raise ParseError(loc, f"unknown node kind {kind!r}")


def plan_to_doc(plan: PlanNode) -> dict:
    return {"format": PLAN_FORMAT, "root": node_to_doc(plan)}


def plan_from_doc(doc: dict) -> PlanNode:
    if not isinstance(doc, dict):
        raise ParseError("$", "document must be a JSON object")
    if doc.get("format") != PLAN_FORMAT:
        raise ParseError("$.format", f"expected {PLAN_FORMAT!r}, got {doc.get('format')!r}")
    if "root" not in doc:
        raise ParseError("$", "missing 'root'")
    plan = node_from_doc(doc["root"], "$.root")
    try:
        validate_plan(plan)
    except Exception as e:
        raise ParseError("$.root", f"plan does not validate: {e}") from e
    return plan


def serialize_plan(plan: PlanNode) -> bytes:
    return json.dumps(plan_to_doc(plan), indent=2, sort_keys=True).encode()


def parse_plan(data: bytes) -> PlanNode:
    if not data or not data.strip():
        raise ParseError("$", "empty document")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"offset {e.pos}", e.msg) from e
    return plan_from_doc(doc)
