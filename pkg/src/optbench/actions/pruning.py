"""Pruning of decision-tree branches using filter-implied feature bounds.

Conjunctive range predicates below the call's node imply an interval per
column; any split whose threshold falls outside the interval has one
unreachable side, which is replaced by the reachable child. Output on all
rows satisfying the filters is unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .. import mlfuncs
from ..ir.derive import derive_schema, expr_dtype
from ..ir.exprs import (
    ColumnRef,
    Compare,
    Expr,
    ForestSpec,
    Literal,
    Logical,
    MLCall,
    TreeNode,
    TreeSpec,
)
from ..ir.nodes import Aggregate, Filter, Join, Limit, PlanNode, Project, Sample, Scan
from .base import ActionContext, RewriteAction
from .expr_utils import transform_calls


@dataclass(frozen=True)
class Interval:
    lo: Optional[float] = None
    lo_strict: bool = False
    hi: Optional[float] = None
    hi_strict: bool = False

    def merge(self, other: "Interval") -> "Interval":
        lo, lo_s = self.lo, self.lo_strict
        if other.lo is not None and (lo is None or other.lo > lo or (other.lo == lo and other.lo_strict)):
            lo, lo_s = other.lo, other.lo_strict
        hi, hi_s = self.hi, self.hi_strict
        if other.hi is not None and (hi is None or other.hi < hi or (other.hi == hi and other.hi_strict)):
            hi, hi_s = other.hi, other.hi_strict
        return Interval(lo, lo_s, hi, hi_s)

    def always_gt(self, threshold: float) -> bool:
        """Every admissible value exceeds the threshold (split always goes right)."""
        if self.lo is None:
            return False
        return self.lo > threshold or (self.lo == threshold and self.lo_strict)

    def always_le(self, threshold: float) -> bool:
        """Every admissible value is <= threshold (split always goes left)."""
        return self.hi is not None and self.hi <= threshold


_FLIPPED = {"gt": "lt", "ge": "le", "lt": "gt", "le": "ge", "eq": "eq"}


def _interval_from_compare(e: Compare) -> Optional[tuple[str, Interval]]:
    lhs, rhs, op = e.lhs, e.rhs, e.op
    if isinstance(lhs, Literal) and isinstance(rhs, ColumnRef):
        lhs, rhs, op = rhs, lhs, _FLIPPED.get(op)
        if op is None:
            return None
    if not (isinstance(lhs, ColumnRef) and isinstance(rhs, Literal)):
        return None
    if rhs.dtype.base not in ("int64", "float64"):
        return None
    v = float(rhs.value)
    if op == "gt":
        return lhs.name, Interval(lo=v, lo_strict=True)
    if op == "ge":
        return lhs.name, Interval(lo=v)
    if op == "lt":
        return lhs.name, Interval(hi=v, hi_strict=True)
    if op == "le":
        return lhs.name, Interval(hi=v)
    if op == "eq":
        return lhs.name, Interval(lo=v, hi=v)
    return None


def bounds_from_predicate(pred: Expr) -> dict[str, Interval]:
    """Column intervals implied by the conjunctive part of one predicate."""
    out: dict[str, Interval] = {}
    stack = [pred]
    while stack:
        e = stack.pop()
        if isinstance(e, Logical) and e.op == "and":
            stack.extend(e.operands)
        elif isinstance(e, Compare):
            got = _interval_from_compare(e)
            if got is not None:
                name, iv = got
                out[name] = out.get(name, Interval()).merge(iv)
    return out


def collect_bounds(plan: PlanNode) -> dict[str, Interval]:
    """Bounds that hold for every row a node emits, tracked through renames."""
    if isinstance(plan, Scan):
        return {}
    if isinstance(plan, Filter):
        bounds = dict(collect_bounds(plan.child))
        for name, iv in bounds_from_predicate(plan.predicate).items():
            bounds[name] = bounds.get(name, Interval()).merge(iv)
        return bounds
    if isinstance(plan, Project):
        child = collect_bounds(plan.child)
        return {
            name: child[e.name]
            for e, name in plan.exprs
            if isinstance(e, ColumnRef) and e.name in child
        }
    if isinstance(plan, Join):
        out = collect_bounds(plan.left)
        out.update(collect_bounds(plan.right))
        return out
    if isinstance(plan, Aggregate):
        child = collect_bounds(plan.child)
        return {
            k.name: child[k.name]
            for k in plan.group_keys
            if isinstance(k, ColumnRef) and k.name in child
        }
    if isinstance(plan, (Limit, Sample)):
        return collect_bounds(plan.child)
    return {}


def prune_tree(tree: TreeSpec, feature_bounds: dict[int, Interval]) -> tuple[bool, TreeSpec]:
    nodes = tree.nodes
    out: list[TreeNode] = []
    pruned = False

    def rec(idx: int) -> int:
        nonlocal pruned
        n = nodes[idx]
        while not n.is_leaf:
            iv = feature_bounds.get(n.feature)
            if iv is not None and iv.always_gt(n.threshold):
                n = nodes[n.right]
                pruned = True
            elif iv is not None and iv.always_le(n.threshold):
                n = nodes[n.left]
                pruned = True
            else:
                break
        if n.is_leaf:
            out.append(n)
            return len(out) - 1
        slot = len(out)
        out.append(n)
        left = rec(n.left)
        right = rec(n.right)
        out[slot] = TreeNode(n.feature, n.threshold, left, right, n.value)
        return slot

    rec(0)
    if not pruned:
        return False, tree
    return True, TreeSpec(tuple(out))


class TreeModelPruning(RewriteAction):
    name = "TreeModelPruning"

    def rewrite_expr(self, expr: Expr, ctx: ActionContext):
        node = ctx.current_node
        if node is None or not node.children:
            return False, expr
        bounds = collect_bounds(node.children[0])
        if not bounds:
            return False, expr
        schema = derive_schema(node.children[0])

        def visit(call: MLCall, path: tuple):
            if call.fn not in (mlfuncs.DECISION_TREE, mlfuncs.DECISION_FOREST):
                return None
            spec = call.attrs.tree_spec
            if spec is None:
                return None
            feat_args = call.args[:-1] if call.attrs.tree_index_from_arg else call.args
            feature_bounds: dict[int, Interval] = {}
            offset = 0
            for arg in feat_args:
                width = expr_dtype(arg, schema).width
                if width == 1 and isinstance(arg, ColumnRef) and arg.name in bounds:
                    feature_bounds[offset] = bounds[arg.name]
                offset += width
            if not feature_bounds:
                return None
            if isinstance(spec, ForestSpec):
                changed = False
                trees = []
                for t in spec.trees:
                    c, t2 = prune_tree(t, feature_bounds)
                    changed = changed or c
                    trees.append(t2)
                if not changed:
                    return None
                new_spec = ForestSpec(tuple(trees), spec.aggregation)
            else:
                changed, new_spec = prune_tree(spec, feature_bounds)
                if not changed:
                    return None
            return MLCall(call.fn, call.args, call.attrs.with_(tree_spec=new_spec))

        return transform_calls(expr, visit)
