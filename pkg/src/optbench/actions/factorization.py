"""Factorization of affine transforms across join inputs.

For a weight matrix applied to features drawn from both sides of a join,
the weight rows are split at the feature partition and each side's partial
product is computed below the join; the partials are summed above it. Sums
commute, so any positional interleaving of left/right features factorizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import mlfuncs
from ..ir.derive import derive_schema, expr_dtype
from ..ir.exprs import ColumnRef, Expr, Literal, MLCall, free_columns, replace_at
from ..ir.nodes import Filter, Join, PlanNode, Project
from ..ir.schema import Schema, matrix
from .base import ActionContext, RewriteAction
from .expr_utils import find_calls
from .relationalize import unique_name


@dataclass
class _FactSite:
    slot: int
    path: tuple
    call: MLCall
    left_args: tuple
    right_args: tuple
    left_rows: list  # weight-row index ranges per side, in arg order
    right_rows: list


def _classify_args(call: MLCall, schema: Schema, left_cols, right_cols) -> Optional[tuple]:
    """Partition feature args by join side; constants ride along on the left."""
    left_args, right_args, left_rows, right_rows = [], [], [], []
    offset = 0
    for arg in call.args[:-1]:
        width = expr_dtype(arg, schema).width
        rows = range(offset, offset + width)
        offset += width
        cols = free_columns(arg)
        if cols and cols <= right_cols:
            right_args.append(arg)
            right_rows.append(rows)
        elif cols <= left_cols:  # includes constant args
            left_args.append(arg)
            left_rows.append(rows)
        else:
            return None
    if not left_args or not right_args:
        return None
    return tuple(left_args), tuple(right_args), left_rows, right_rows


class MLFactorization(RewriteAction):
    name = "MLFactorization"

    def _analyze(self, node: PlanNode, ctx: ActionContext) -> Optional[tuple]:
        if not isinstance(node, Project):
            return None
        filters: list[Filter] = []
        cur = node.child
        while isinstance(cur, Filter):
            filters.append(cur)
            cur = cur.child
        if not isinstance(cur, Join):
            return None
        schema = derive_schema(node.child)
        left_cols = frozenset(derive_schema(cur.left).names)
        right_cols = frozenset(derive_schema(cur.right).names)
        for slot, (e, _) in enumerate(node.exprs):
            for path, call in find_calls(e):
                if call.fn != mlfuncs.MATRIX_MULTIPLY or call.attrs.im2col is not None:
                    continue
                w = call.args[-1]
                if not (isinstance(w, Literal) and w.dtype.base == "matrix"):
                    continue
                split = _classify_args(call, schema, left_cols, right_cols)
                if split is None:
                    continue
                site = _FactSite(slot, path, call, split[0], split[1], split[2], split[3])
                return filters, cur, site
        return None

    def matches_plan(self, node: PlanNode, ctx: ActionContext) -> bool:
        return self._analyze(node, ctx) is not None

    def rewrite_plan(self, node: PlanNode, ctx: ActionContext) -> PlanNode:
        analysis = self._analyze(node, ctx)
        if analysis is None:
            return node
        filters, join, site = analysis
        call = site.call
        w = np.asarray(call.args[-1].value, dtype=np.float64)
        cols = w.shape[1]
        taken = set(derive_schema(node.child).names)

        def side_partial(side_node: PlanNode, args, row_ranges, name: str) -> tuple[PlanNode, str]:
            rows = [i for rng in row_ranges for i in rng]
            w_side = w[rows, :]
            lit = Literal(tuple(tuple(float(x) for x in r) for r in w_side), matrix(len(rows), cols))
            partial = MLCall(
                mlfuncs.MATRIX_MULTIPLY,
                tuple(args) + (lit,),
                call.attrs.with_(weight_shape=(len(rows), cols), bias_shape=None),
            )
            col_name = unique_name(name, taken)
            passthrough = tuple((ColumnRef(n), n) for n in derive_schema(side_node).names)
            return Project(side_node, passthrough + ((partial, col_name),)), col_name

        new_left, lcol = side_partial(join.left, site.left_args, site.left_rows, "__factl")
        new_right, rcol = side_partial(join.right, site.right_args, site.right_rows, "__factr")
        new_join = Join(new_left, new_right, join.join_type, join.condition)

        below: PlanNode = new_join
        for f in reversed(filters):
            below = Filter(below, f.predicate)

        combined = MLCall(mlfuncs.MATRIX_ADDITION, (ColumnRef(lcol), ColumnRef(rcol)))
        new_exprs = list(node.exprs)
        e, out_name = new_exprs[site.slot]
        new_exprs[site.slot] = (replace_at(e, site.path, combined), out_name)
        return Project(below, tuple(new_exprs))
