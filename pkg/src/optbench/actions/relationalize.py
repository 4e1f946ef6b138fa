"""Relationalization of ML computations into join + aggregate form.

Both actions compute per-row partial results in a slim pipeline, group them
by a row key, and join the grouped values back onto the original row
stream. Grouping is only sound if the key identifies one source row per
group, so the slim pipeline is sourced from the base-table scan that (per
column provenance) supplies every feature column and a unique int64 key.
With an explicit `params["row_key"]` the pipeline is sourced from the
node's child directly and the caller asserts key uniqueness there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import mlfuncs
from ..ir.derive import derive_schema, expr_dtype
from ..ir.exprs import (
    Arith,
    ColumnRef,
    Compare,
    Expr,
    ForestSpec,
    Literal,
    MLCall,
    free_columns,
    replace_at,
    walk,
)
from ..ir.nodes import Aggregate, Join, PlanNode, Project, Scan
from ..ir.schema import FLOAT64, INT64, Schema
from ..stats.estimator import column_provenance
from .base import ActionContext, RewriteAction
from .expr_utils import find_calls


def unique_name(base: str, taken) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def rename_columns(expr: Expr, mapping: dict[str, str]) -> Expr:
    for path, sub in sorted(walk(expr), key=lambda kv: -len(kv[0])):
        if isinstance(sub, ColumnRef) and sub.name in mapping and mapping[sub.name] != sub.name:
            expr = replace_at(expr, path, ColumnRef(mapping[sub.name]))
    return expr


@dataclass
class _Source:
    plan: PlanNode  # slim pipeline input (base scan or the child itself)
    key_in_child: str  # join-back key as named in the child's schema
    key_in_source: str  # the same key as named in the source's schema
    rename: dict[str, str]  # child column -> source column, for feature exprs


def resolve_source(child: PlanNode, ctx: ActionContext, feature_cols, params) -> Optional[_Source]:
    schema = derive_schema(child)
    explicit = params.get("row_key")
    if explicit is not None:
        if explicit in schema and schema.dtype_of(explicit) == INT64:
            return _Source(child, explicit, explicit, {})
        return None
    prov = column_provenance(child)
    if any(c not in prov for c in feature_cols):
        return None
    tables = {prov[c][0] for c in feature_cols}
    if len(tables) != 1:
        return None
    (table,) = tables
    if table not in ctx.catalog.tables:
        return None
    for name in schema.names:
        if schema.dtype_of(name) == INT64 and name in prov:
            t, base_col = prov[name]
            if t == table and ctx.catalog.is_unique(t, base_col):
                base = ctx.catalog.get(table)
                rename = {c: prov[c][1] for c in feature_cols}
                return _Source(Scan(table, base.schema), name, base_col, rename)
    return None


def _rejoin(child: PlanNode, grouped: Aggregate, source: _Source, out_col: str, taken) -> PlanNode:
    rk = unique_name("__rk", taken)
    renamed = Project(grouped, ((ColumnRef(source.key_in_source), rk), (ColumnRef(out_col), out_col)))
    return Join(child, renamed, "inner",
                Compare("eq", ColumnRef(source.key_in_child), ColumnRef(rk)))


def _replace_call_in_exprs(exprs, slot: int, call_path: tuple, replacement: Expr):
    out = []
    for i, (e, name) in enumerate(exprs):
        out.append((replace_at(e, call_path, replacement) if i == slot else e, name))
    return tuple(out)


class MatMul2Relation(RewriteAction):
    """Rewrite a dot-product matrix multiply into cross join with a weight
    relation, per-feature-index multiply, and a grouped SUM."""

    name = "MatMul2Relation"

    @classmethod
    def default_params(cls):
        return {"row_key": None}

    def _find_site(self, node: PlanNode, ctx: ActionContext):
        if not isinstance(node, Project):
            return None
        child_schema = derive_schema(node.child)
        for slot, (e, _) in enumerate(node.exprs):
            for call_path, call in find_calls(e):
                if call.fn != mlfuncs.MATRIX_MULTIPLY or call.attrs.im2col is not None:
                    continue
                if len(call.args) != 2:
                    continue
                x, w = call.args
                if not (isinstance(w, Literal) and w.dtype.base == "matrix" and w.dtype.dims[1] == 1):
                    continue
                try:
                    if expr_dtype(x, child_schema).base != "vector":
                        continue
                except Exception:
                    continue
                cols = sorted(free_columns(x))
                if not cols:
                    continue
                source = resolve_source(node.child, ctx, cols, self.params)
                if source is None:
                    continue
                return slot, call_path, call, source
        return None

    def matches_plan(self, node: PlanNode, ctx: ActionContext) -> bool:
        return self._find_site(node, ctx) is not None

    def rewrite_plan(self, node: PlanNode, ctx: ActionContext) -> PlanNode:
        site = self._find_site(node, ctx)
        if site is None:
            return node
        slot, call_path, call, source = site
        child = node.child
        taken = set(derive_schema(child).names) | set(derive_schema(source.plan).names)
        x = rename_columns(call.args[0], source.rename)
        weights = np.asarray(call.args[1].value, dtype=np.float64)[:, 0]

        x_col = unique_name("__x", taken)
        slim = Project(source.plan, ((ColumnRef(source.key_in_source), source.key_in_source), (x, x_col)))
        k_col, w_col = unique_name("__k", taken), unique_name("__w", taken)
        weight_rel = Scan(
            "__weights",
            Schema(((k_col, INT64), (w_col, FLOAT64))),
            inline_rows=tuple((k, float(w)) for k, w in enumerate(weights)),
        )
        paired = Join(slim, weight_rel, "cross")
        term = Arith("mul", Arith("get", ColumnRef(x_col), ColumnRef(k_col)), ColumnRef(w_col))
        term_col = unique_name("__term", taken)
        terms = Project(paired, ((ColumnRef(source.key_in_source), source.key_in_source), (term, term_col)))
        dot_col = unique_name("__dot", taken)
        grouped = Aggregate(terms, (ColumnRef(source.key_in_source),),
                            (("sum", ColumnRef(term_col), dot_col),))
        joined = _rejoin(child, grouped, source, dot_col, taken)
        new_exprs = _replace_call_in_exprs(node.exprs, slot, call_path, ColumnRef(dot_col))
        return Project(joined, new_exprs)


class DecisionForestUDF2Relation(RewriteAction):
    """Rewrite forest inference into a cross join against a tree-id relation,
    a per-row single-tree call, and the forest's aggregation grouped by row."""

    name = "DecisionForestUDF2Relation"

    @classmethod
    def default_params(cls):
        return {"row_key": None}

    def _find_site(self, node: PlanNode, ctx: ActionContext):
        if not isinstance(node, Project):
            return None
        for slot, (e, _) in enumerate(node.exprs):
            for call_path, call in find_calls(e):
                if call.fn != mlfuncs.DECISION_FOREST:
                    continue
                if not isinstance(call.attrs.tree_spec, ForestSpec):
                    continue
                cols = sorted(set().union(*[free_columns(a) for a in call.args]) if call.args else set())
                if not cols:
                    continue
                source = resolve_source(node.child, ctx, cols, self.params)
                if source is None:
                    continue
                return slot, call_path, call, source
        return None

    def matches_plan(self, node: PlanNode, ctx: ActionContext) -> bool:
        return self._find_site(node, ctx) is not None

    def rewrite_plan(self, node: PlanNode, ctx: ActionContext) -> PlanNode:
        site = self._find_site(node, ctx)
        if site is None:
            return node
        slot, call_path, call, source = site
        child = node.child
        taken = set(derive_schema(child).names) | set(derive_schema(source.plan).names)
        forest: ForestSpec = call.attrs.tree_spec

        feat_cols = []
        slim_exprs = [(ColumnRef(source.key_in_source), source.key_in_source)]
        for i, arg in enumerate(call.args):
            fname = unique_name(f"__f{i}", taken)
            slim_exprs.append((rename_columns(arg, source.rename), fname))
            feat_cols.append(fname)
        slim = Project(source.plan, tuple(slim_exprs))

        tree_col = unique_name("__tree", taken)
        tree_rel = Scan(
            "__trees",
            Schema(((tree_col, INT64),)),
            inline_rows=tuple((t,) for t in range(len(forest.trees))),
        )
        paired = Join(slim, tree_rel, "cross")
        vote = MLCall(
            mlfuncs.DECISION_TREE,
            tuple(ColumnRef(c) for c in feat_cols) + (ColumnRef(tree_col),),
            call.attrs.with_(tree_index_from_arg=True),
        )
        vote_col = unique_name("__vote", taken)
        votes = Project(paired, ((ColumnRef(source.key_in_source), source.key_in_source), (vote, vote_col)))
        agg_fn = {"mean": "avg", "sum": "sum", "majority": "majority_vote"}[forest.aggregation]
        pred_col = unique_name("__pred", taken)
        grouped = Aggregate(votes, (ColumnRef(source.key_in_source),),
                            ((agg_fn, ColumnRef(vote_col), pred_col),))
        joined = _rejoin(child, grouped, source, pred_col, taken)
        new_exprs = _replace_call_in_exprs(node.exprs, slot, call_path, ColumnRef(pred_col))
        return Project(joined, new_exprs)
