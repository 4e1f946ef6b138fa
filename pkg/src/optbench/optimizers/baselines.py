"""Baseline optimizer profiles: identity and classical filter pushdown."""

from __future__ import annotations

import time

from ..ir.derive import derive_schema
from ..ir.exprs import Expr, Logical, free_columns
from ..ir.hashing import canonical_hash
from ..ir.nodes import Filter, Join, PlanNode
from .trace import DecisionTrace


def _conjuncts(pred: Expr) -> list[Expr]:
    if isinstance(pred, Logical) and pred.op == "and":
        out = []
        for o in pred.operands:
            out.extend(_conjuncts(o))
        return out
    return [pred]


def _conjoin(parts: list[Expr]) -> Expr:
    return parts[0] if len(parts) == 1 else Logical("and", tuple(parts))


def push_filters_down(plan: PlanNode) -> PlanNode:
    """Move single-side filter conjuncts below joins (relational pushdown only)."""
    plan = plan.with_children(tuple(push_filters_down(c) for c in plan.children))
    if not (isinstance(plan, Filter) and isinstance(plan.child, Join)):
        return plan
    join = plan.child
    left_cols = frozenset(derive_schema(join.left).names)
    right_cols = frozenset(derive_schema(join.right).names)
    left_parts, right_parts, keep = [], [], []
    for c in _conjuncts(plan.predicate):
        cols = free_columns(c)
        if cols and cols <= left_cols:
            left_parts.append(c)
        elif cols and cols <= right_cols:
            right_parts.append(c)
        else:
            keep.append(c)
    if not left_parts and not right_parts:
        return plan
    new_left = push_filters_down(Filter(join.left, _conjoin(left_parts))) if left_parts else join.left
    new_right = push_filters_down(Filter(join.right, _conjoin(right_parts))) if right_parts else join.right
    new_join = Join(new_left, new_right, join.join_type, join.condition)
    return Filter(new_join, _conjoin(keep)) if keep else new_join


def run_noop(plan: PlanNode) -> tuple[PlanNode, DecisionTrace]:
    h = canonical_hash(plan)
    return plan, DecisionTrace(input_hash=h, output_hash=h, final_cost=None)


def run_filter_pushdown(plan: PlanNode) -> tuple[PlanNode, DecisionTrace]:
    t0 = time.perf_counter()
    out = push_filters_down(plan)
    trace = DecisionTrace(input_hash=canonical_hash(plan), output_hash=canonical_hash(out))
    trace.elapsed_ms = (time.perf_counter() - t0) * 1000.0
    if trace.input_hash != trace.output_hash:
        trace.rule_fired("filter-pushdown", {})
    return out, trace
