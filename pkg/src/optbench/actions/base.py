"""Rewrite action abstraction and the generic plan-rewrite applier.

The applier visits every node of the plan tree and, per node, (1) applies
the action's plan-level rewrite when it matches, (2) rewrites each contained
expression, (3) recurses into children, OR-ing modification flags. It
returns the rewritten tree and the combined flag, and emits one delta per
structural change so optimizer traces can replay the run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..engine.table import Catalog
from ..errors import RewriteProducedInvalidPlan
from ..ir.derive import derive_schema, validate_plan
from ..ir.exprs import Expr
from ..ir.hashing import canonical_hash, expr_hash
from ..ir.nodes import NodePath, PlanNode, node_exprs, with_node_exprs
from ..stats.vector import StatsVector


@dataclass(frozen=True)
class RewriteDelta:
    action: str
    node_path: NodePath
    before_hash: int
    after_hash: int
    description: str

    def to_doc(self) -> dict:
        return {
            "action": self.action,
            "node_path": ".".join(map(str, self.node_path)) or "root",
            "before_hash": f"{self.before_hash:016x}",
            "after_hash": f"{self.after_hash:016x}",
            "description": self.description,
        }


@dataclass
class ActionContext:
    """State shared with an action during one applier run."""

    stats: StatsVector
    catalog: Catalog
    deltas: list[RewriteDelta] = field(default_factory=list)
    # traversal cursor, maintained by the applier
    node_path: NodePath = ()
    expr_slot: int = 0
    current_node: Optional[PlanNode] = None

    @property
    def models(self):
        return self.catalog.models

    def ml_stats(self, call_path: tuple) -> dict:
        return self.stats.ml_at(self.node_path, self.expr_slot, call_path)

    def input_rows(self) -> float:
        try:
            return self.stats.expr_input_rows(self.node_path)
        except KeyError:
            return 0.0

    def child_schema(self):
        node = self.current_node
        if node is None or not node.children:
            return None
        return derive_schema(node.children[0])


class RewriteAction:
    """A named, parameterized, semantics-preserving plan/expression transformation.

    Rewrite methods are total: they return their input unchanged when the
    pattern does not apply. `matches_plan` must only report True when
    `rewrite_plan` will actually change the node.
    """

    name: str = "abstract"

    def __init__(self, params: dict | None = None, name: str | None = None):
        self.params = {**self.default_params(), **(params or {})}
        if name is not None:
            self.name = name

    @classmethod
    def default_params(cls) -> dict:
        return {}

    def with_params(self, params: dict | None = None, name: str | None = None) -> "RewriteAction":
        merged = {**self.params, **(params or {})}
        return type(self)(params=merged, name=name or self.name)

    # --- hooks ---

    def matches_plan(self, node: PlanNode, ctx: ActionContext) -> bool:
        return False

    def rewrite_plan(self, node: PlanNode, ctx: ActionContext) -> PlanNode:
        return node

    def rewrite_expr(self, expr: Expr, ctx: ActionContext) -> tuple[bool, Expr]:
        return False, expr

    def describe(self) -> dict:
        return {"name": self.name, "params": dict(self.params)}


def apply_plan_rewrite(
    action: RewriteAction, plan: PlanNode, context: ActionContext
) -> tuple[bool, PlanNode]:
    """Apply one action across a plan tree (single traversal).

    Returns (modified, rewritten plan). The input tree is never mutated;
    deltas are appended to `context.deltas`. Raises
    RewriteProducedInvalidPlan if the rewritten tree fails schema
    derivation, which signals an action bug.
    """
    modified, rewritten = _apply(action, plan, (), context)
    if modified:
        try:
            validate_plan(rewritten)
        except Exception as e:
            raise RewriteProducedInvalidPlan(action.name, e) from e
    return modified, rewritten


def _apply(action: RewriteAction, node: PlanNode, path: NodePath, ctx: ActionContext):
    modified = False
    ctx.node_path = path
    ctx.current_node = node

    # 1. plan-level match and rewrite
    if action.matches_plan(node, ctx):
        before = canonical_hash(node)
        node = action.rewrite_plan(node, ctx)
        ctx.deltas.append(
            RewriteDelta(action.name, path, before, canonical_hash(node), f"rewrote {node.kind} node")
        )
        modified = True

    # 2. expression rewrites on the (possibly rewritten) node
    exprs = node_exprs(node)
    if exprs:
        new_exprs = []
        changed_any = False
        for slot, e in enumerate(exprs):
            ctx.node_path = path
            ctx.expr_slot = slot
            ctx.current_node = node
            changed, e2 = action.rewrite_expr(e, ctx)
            if changed:
                ctx.deltas.append(
                    RewriteDelta(
                        action.name, path, expr_hash(e), expr_hash(e2),
                        f"rewrote expression slot {slot}",
                    )
                )
                changed_any = True
                modified = True
            new_exprs.append(e2)
        if changed_any:
            node = with_node_exprs(node, tuple(new_exprs))

    # 3. recurse into children of the (possibly rewritten) node
    if node.children:
        new_children = []
        child_changed = False
        for i, child in enumerate(node.children):
            m, c2 = _apply(action, child, path + (i,), ctx)
            if m:
                child_changed = True
                modified = True
            new_children.append(c2)
        if child_changed:
            node = node.with_children(tuple(new_children))

    return modified, node
