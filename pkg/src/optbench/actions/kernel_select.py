"""Dense-to-sparse kernel selection for matrix multiplication."""

from __future__ import annotations

from .. import mlfuncs
from ..ir.exprs import Expr, MLCall
from .base import ActionContext, RewriteAction
from .expr_utils import transform_calls


class MatMulDense2Sparse(RewriteAction):
    """Annotate dense matrix multiplications with the sparse kernel when the
    sampled sparsity clears a threshold and the input is large enough."""

    name = "MatMulDense2Sparse"

    @classmethod
    def default_params(cls):
        return {"sparsity_threshold": 0.7, "min_rows": 1_000_000}

    def _should_flip(self, call: MLCall, call_path: tuple, ctx: ActionContext) -> bool:
        if call.fn != mlfuncs.MATRIX_MULTIPLY or call.attrs.kernel_mode == "sparse":
            return False
        stats = ctx.ml_stats(call_path)
        if "nnz_ratio" not in stats:
            return False
        sparsity = 1.0 - stats["nnz_ratio"].value
        return (
            sparsity > self.params["sparsity_threshold"]
            and ctx.input_rows() >= self.params["min_rows"]
        )

    def rewrite_expr(self, expr: Expr, ctx: ActionContext):
        def visit(call: MLCall, path: tuple):
            if self._should_flip(call, path, ctx):
                return MLCall(call.fn, call.args, call.attrs.with_(kernel_mode="sparse"))
            return None

        return transform_calls(expr, visit)
