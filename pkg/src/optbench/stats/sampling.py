"""Sampling-based feature statistics (sparsity and structural zeros)."""

from __future__ import annotations

import numpy as np

from .. import mlfuncs
from ..engine.executor import Executor, _Block
from ..engine.table import Catalog
from ..errors import EmptySample, NonNumericFeature
from ..ir.exprs import ColumnRef, Expr, MLCall
from ..ir.nodes import PlanNode, Sample


def feature_args_of(call: MLCall) -> tuple[Expr, ...]:
    """Arguments whose values form the call's numeric feature input."""
    fn = call.fn
    if fn == mlfuncs.MATRIX_MULTIPLY:
        return call.args[:-1]
    if fn == mlfuncs.DECISION_TREE and call.attrs.tree_index_from_arg:
        return call.args[:-1]
    if fn in (mlfuncs.ONE_HOT_ENCODER, mlfuncs.NAIVE_BAYES, mlfuncs.LLM):
        return ()
    return call.args


def matrix_stats(x: np.ndarray) -> dict[str, float]:
    """Exact nonzero/zero-row/zero-col fractions of a feature matrix."""
    if x.size == 0:
        raise EmptySample("no rows reached the sampling probe")
    nz = x != 0.0
    return {
        "nnz_ratio": float(nz.sum()) / x.size,
        "zero_rows": float((~nz.any(axis=1)).sum()) / x.shape[0],
        "zero_cols": float((~nz.any(axis=0)).sum()) / x.shape[1],
    }


def evaluate_feature_matrix(executor: Executor, block, feature_args) -> np.ndarray:
    """Feature values of sampled rows as a dense (rows, width) matrix."""
    parts = []
    for arg in feature_args:
        vals = executor._materialize_expr(arg, block)
        if vals.dtype == object:
            raise NonNumericFeature(f"feature argument {arg} is not numeric")
        arr = np.asarray(vals, dtype=np.float64)
        if arr.ndim == 1:
            parts.append(arr[:, None])
        else:
            parts.append(arr.reshape(arr.shape[0], -1))
    if not parts:
        raise NonNumericFeature("call has no numeric feature arguments")
    return np.concatenate(parts, axis=1)


def sample_ml_stats(
    node_child: PlanNode,
    expr: Expr,
    catalog: Catalog,
    sample_size: int,
    seed: int,
) -> dict[str, float]:
    """Run a Sample-limited probe of `node_child` and measure `expr`'s features.

    `expr` is an MLCall or a feature-typed column reference. Deterministic
    for a fixed (plan, seed, sample-size).
    """
    if isinstance(expr, MLCall):
        feature_args = feature_args_of(expr)
    elif isinstance(expr, ColumnRef):
        feature_args = (expr,)
    else:
        raise NonNumericFeature("expected an MLCall or a column reference")
    if not feature_args:
        raise NonNumericFeature(f"{expr} has no numeric feature inputs")

    probe = Sample(node_child, sample_size, seed)
    executor = Executor(catalog)
    result = executor.run(probe)
    if result.n_rows == 0:
        raise EmptySample("no rows reached the sampling probe")
    block = _Block(result.schema, result.columns, result.n_rows)
    x = evaluate_feature_matrix(executor, block, feature_args)
    out = matrix_stats(x)
    out["sample_rows"] = float(result.n_rows)
    return out
