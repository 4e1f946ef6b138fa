"""Structural plan diffs for side-by-side rendering."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..ir.exprs import Expr, MLCall, children_of
from ..ir.nodes import Aggregate, Join, Limit, PlanNode, Project, Sample, Scan, node_exprs


def _node_summary(node: PlanNode) -> dict:
    out = {"kind": node.kind, "children": len(node.children)}
    if isinstance(node, Scan):
        out["table"] = node.table
    if isinstance(node, Join):
        out["join_type"] = node.join_type
    if isinstance(node, Project):
        out["columns"] = [n for _, n in node.exprs]
    if isinstance(node, Aggregate):
        out["aggregates"] = [n for _, _, n in node.aggregates]
    if isinstance(node, Limit):
        out["n"] = node.n
    if isinstance(node, Sample):
        out["n"] = node.n
    out["ml_calls"] = sum(
        1 for e in node_exprs(node) for c in _walk_exprs(e) if isinstance(c, MLCall)
    )
    return out


def _walk_exprs(e: Expr):
    yield e
    for c in children_of(e):
        yield from _walk_exprs(c)


def _exprs_equal_ignoring_attrs(a: Expr, b: Expr) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, MLCall):
        if a.fn != b.fn or len(a.args) != len(b.args):
            return False
        return all(_exprs_equal_ignoring_attrs(x, y) for x, y in zip(a.args, b.args))
    ka = children_of(a)
    kb = children_of(b)
    if len(ka) != len(kb):
        return False
    if not ka:
        return a == b
    import dataclasses

    fa = {f.name: getattr(a, f.name) for f in dataclasses.fields(a) if not isinstance(getattr(a, f.name), (Expr, tuple))}
    fb = {f.name: getattr(b, f.name) for f in dataclasses.fields(b) if not isinstance(getattr(b, f.name), (Expr, tuple))}
    if fa != fb:
        return False
    return all(_exprs_equal_ignoring_attrs(x, y) for x, y in zip(ka, kb))


@dataclass
class PlanDiff:
    entries: list[dict] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.entries

    def paths(self) -> list[str]:
        return [e["path"] for e in self.entries]

    def to_doc(self) -> dict:
        return {"entries": self.entries, "empty": self.empty}


def diff_plans(a: PlanNode, b: PlanNode) -> PlanDiff:
    """Tree edit summary between two plans.

    Entries carry dotted node paths plus a change class: `attr-changed`
    (expressions differ only in ML call annotations), `expr-changed`,
    `field-changed`, or `replaced` (different operator or arity; the whole
    subtree at that path was swapped).
    """
    diff = PlanDiff()

    def rec(x: PlanNode, y: PlanNode, path: tuple):
        if x == y:
            return
        dotted = ".".join(map(str, path)) or "root"
        if x.kind != y.kind or len(x.children) != len(y.children):
            diff.entries.append({
                "path": dotted,
                "change": "replaced",
                "before": _node_summary(x),
                "after": _node_summary(y),
            })
            return
        ex, ey = node_exprs(x), node_exprs(y)
        own_changed = x.with_children(y.children) != y if x.children else x != y
        if own_changed:
            if len(ex) == len(ey) and all(_exprs_equal_ignoring_attrs(p, q) for p, q in zip(ex, ey)):
                change = "attr-changed"
            elif len(ex) != len(ey) or any(p != q for p, q in zip(ex, ey)):
                change = "expr-changed"
            else:
                change = "field-changed"
            diff.entries.append({
                "path": dotted,
                "change": change,
                "before": _node_summary(x),
                "after": _node_summary(y),
            })
        for i, (cx, cy) in enumerate(zip(x.children, y.children)):
            rec(cx, cy, path + (i,))

    rec(a, b, ())
    return diff
