"""Logical plan nodes.

Plans are immutable trees; every rewrite builds fresh nodes. A node's output
schema is a pure function of its kind and children and is derived lazily
(see `derive.py`).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from ..errors import ValidationError
from .exprs import Expr
from .schema import Schema

AGG_FNS = ("sum", "count", "avg", "min", "max", "majority_vote")

NodePath = tuple[int, ...]


class PlanNode:
    """Marker base class; concrete nodes are frozen dataclasses."""

    __slots__ = ()

    @property
    def children(self) -> tuple["PlanNode", ...]:
        raise NotImplementedError

    def with_children(self, children: tuple["PlanNode", ...]) -> "PlanNode":
        raise NotImplementedError

    @property
    def kind(self) -> str:
        return type(self).__name__.lower()


@dataclass(frozen=True)
class Scan(PlanNode):
    """Base-table scan; `inline_rows` turns it into an embedded constant relation."""

    table: str
    schema: Schema
    inline_rows: Optional[tuple[tuple, ...]] = None

    def __post_init__(self):
        if self.inline_rows is not None:
            for r in self.inline_rows:
                if len(r) != len(self.schema):
                    raise ValidationError("inline row width does not match schema")

    @property
    def children(self):
        return ()

    def with_children(self, children):
        if children:
            raise ValidationError("scan takes no children")
        return self


@dataclass(frozen=True)
class Filter(PlanNode):
    child: PlanNode
    predicate: Expr

    @property
    def children(self):
        return (self.child,)

    def with_children(self, children):
        (c,) = children
        return replace(self, child=c)


@dataclass(frozen=True)
class Project(PlanNode):
    child: PlanNode
    exprs: tuple[tuple[Expr, str], ...]  # (expression, output column name)

    @property
    def children(self):
        return (self.child,)

    def with_children(self, children):
        (c,) = children
        return replace(self, child=c)


@dataclass(frozen=True)
class Join(PlanNode):
    left: PlanNode
    right: PlanNode
    join_type: str  # inner | cross
    condition: Optional[Expr] = None

    def __post_init__(self):
        if self.join_type not in ("inner", "cross"):
            raise ValidationError(f"unknown join type {self.join_type!r}")
        if self.join_type == "cross" and self.condition is not None:
            raise ValidationError("cross join takes no condition")
        if self.join_type == "inner" and self.condition is None:
            raise ValidationError("inner join requires a condition")

    @property
    def children(self):
        return (self.left, self.right)

    def with_children(self, children):
        l, r = children
        return replace(self, left=l, right=r)


@dataclass(frozen=True)
class Aggregate(PlanNode):
    child: PlanNode
    group_keys: tuple[Expr, ...]
    aggregates: tuple[tuple[str, Expr, str], ...]  # (fn, expression, output name)

    def __post_init__(self):
        for fn, _, _ in self.aggregates:
            if fn not in AGG_FNS:
                raise ValidationError(f"unknown aggregate function {fn!r}")

    @property
    def children(self):
        return (self.child,)

    def with_children(self, children):
        (c,) = children
        return replace(self, child=c)


@dataclass(frozen=True)
class Limit(PlanNode):
    child: PlanNode
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("limit must be non-negative")

    @property
    def children(self):
        return (self.child,)

    def with_children(self, children):
        (c,) = children
        return replace(self, child=c)


@dataclass(frozen=True)
class Sample(PlanNode):
    """Deterministic reservoir sample of `n` rows."""

    child: PlanNode
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("sample size must be non-negative")

    @property
    def children(self):
        return (self.child,)

    def with_children(self, children):
        (c,) = children
        return replace(self, child=c)


def node_at(plan: PlanNode, path: NodePath) -> PlanNode:
    for i in path:
        plan = plan.children[i]
    return plan


def replace_node_at(plan: PlanNode, path: NodePath, replacement: PlanNode) -> PlanNode:
    if not path:
        return replacement
    kids = list(plan.children)
    kids[path[0]] = replace_node_at(kids[path[0]], path[1:], replacement)
    return plan.with_children(tuple(kids))


def walk_plan(plan: PlanNode):
    """Yield (path, node) preorder."""
    stack = [((), plan)]
    while stack:
        path, node = stack.pop(0)
        yield path, node
        stack[0:0] = [(path + (i,), c) for i, c in enumerate(node.children)]


def node_exprs(node: PlanNode) -> tuple[Expr, ...]:
    """Expression slots contained in one node, in a fixed order."""
    if isinstance(node, Filter):
        return (node.predicate,)
    if isinstance(node, Project):
        return tuple(e for e, _ in node.exprs)
    if isinstance(node, Join):
        return (node.condition,) if node.condition is not None else ()
    if isinstance(node, Aggregate):
        return node.group_keys + tuple(e for _, e, _ in node.aggregates)
    return ()


def with_node_exprs(node: PlanNode, exprs: tuple[Expr, ...]) -> PlanNode:
    """Rebuild a node with its expression slots replaced (same order as node_exprs)."""
    if isinstance(node, Filter):
        (p,) = exprs
        return replace(node, predicate=p)
    if isinstance(node, Project):
        return replace(node, exprs=tuple((e, n) for e, (_, n) in zip(exprs, node.exprs)))
    if isinstance(node, Join):
        if node.condition is None:
            return node
        (c,) = exprs
        return replace(node, condition=c)
    if isinstance(node, Aggregate):
        nk = len(node.group_keys)
        keys = exprs[:nk]
        aggs = tuple((fn, e, n) for e, (fn, _, n) in zip(exprs[nk:], node.aggregates))
        return replace(node, group_keys=tuple(keys), aggregates=aggs)
    if exprs:
        raise ValidationError(f"{node.kind} has no expression slots")
    return node


def clone(plan: PlanNode) -> PlanNode:
    """Deep structural copy (fresh node objects, shared immutable leaves)."""
    return plan.with_children(tuple(clone(c) for c in plan.children)) if plan.children else replace(plan)
