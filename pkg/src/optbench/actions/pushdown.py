"""Decomposition of compound ML expressions and pushdown below joins.

A sub-operator is safe to push when it is a deterministic MLCall whose free
columns all resolve within one join input; it is then computed in a
passthrough projection inserted above that input, and the original site
references the precomputed column. Expensive inference thereby runs on the
join input's rows instead of the (often larger) join output.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from ..ir.derive import derive_schema
from ..ir.exprs import ColumnRef, Expr, MLCall, children_of, free_columns, replace_at
from ..ir.nodes import Filter, Join, PlanNode, Project
from .base import ActionContext, RewriteAction
from .relationalize import unique_name


@dataclass
class _PushSite:
    slot: int
    path: tuple
    expr: Expr
    side: str  # left | right


@dataclass
class _Analysis:
    filters: list[Filter]
    join: Join
    sites: list[_PushSite]


def _collect_pushable(e: Expr, path: tuple, left_cols, right_cols, out: list, slot: int):
    if isinstance(e, MLCall):
        cols = free_columns(e)
        if cols and cols <= left_cols:
            out.append(_PushSite(slot, path, e, "left"))
            return
        if cols and cols <= right_cols:
            out.append(_PushSite(slot, path, e, "right"))
            return
    for i, c in enumerate(children_of(e)):
        _collect_pushable(c, path + (i,), left_cols, right_cols, out, slot)


class MLDecompositionPushdown(RewriteAction):
    name = "MLDecompositionPushdown"

    def _analyze(self, node: PlanNode, ctx: ActionContext) -> Optional[_Analysis]:
        if not isinstance(node, (Project, Filter)):
            return None
        filters: list[Filter] = []
        cur = node.child
        while isinstance(cur, Filter):
            filters.append(cur)
            cur = cur.child
        if not isinstance(cur, Join):
            return None
        left_cols = frozenset(derive_schema(cur.left).names)
        right_cols = frozenset(derive_schema(cur.right).names)
        sites: list[_PushSite] = []
        if isinstance(node, Project):
            for slot, (e, _) in enumerate(node.exprs):
                _collect_pushable(e, (), left_cols, right_cols, sites, slot)
        else:
            _collect_pushable(node.predicate, (), left_cols, right_cols, sites, 0)
        if not sites:
            return None
        return _Analysis(filters, cur, sites)

    def matches_plan(self, node: PlanNode, ctx: ActionContext) -> bool:
        return self._analyze(node, ctx) is not None

    def rewrite_plan(self, node: PlanNode, ctx: ActionContext) -> PlanNode:
        analysis = self._analyze(node, ctx)
        if analysis is None:
            return node
        join = analysis.join
        taken = set(derive_schema(node.child).names)

        # one helper column per distinct pushed expression, per side
        assignments: dict[tuple[str, Expr], str] = {}
        for i, site in enumerate(analysis.sites):
            key = (site.side, site.expr)
            if key not in assignments:
                assignments[key] = unique_name(f"__push{len(assignments)}", taken)

        def augmented(side_node: PlanNode, side: str) -> PlanNode:
            extra = [(e, name) for (s, e), name in assignments.items() if s == side]
            if not extra:
                return side_node
            passthrough = tuple((ColumnRef(n), n) for n in derive_schema(side_node).names)
            return Project(side_node, passthrough + tuple(extra))

        new_join = Join(
            augmented(join.left, "left"),
            augmented(join.right, "right"),
            join.join_type,
            join.condition,
        )

        # rebuild the filter chain above the join unchanged
        below: PlanNode = new_join
        for f in reversed(analysis.filters):
            below = Filter(below, f.predicate)

        if isinstance(node, Project):
            new_exprs = list(node.exprs)
            for site in analysis.sites:
                name = assignments[(site.side, site.expr)]
                e, out_name = new_exprs[site.slot]
                new_exprs[site.slot] = (replace_at(e, site.path, ColumnRef(name)), out_name)
            return Project(below, tuple(new_exprs))

        pred = node.predicate
        for site in analysis.sites:
            pred = replace_at(pred, site.path, ColumnRef(assignments[(site.side, site.expr)]))
        filtered = Filter(below, pred)
        original = derive_schema(node).names
        return Project(filtered, tuple((ColumnRef(n), n) for n in original))
