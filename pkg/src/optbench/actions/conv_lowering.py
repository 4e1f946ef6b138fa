"""Lowering of 2-d convolution to matrix multiplication."""

from __future__ import annotations

import numpy as np

from .. import mlfuncs
from ..errors import UnsupportedConvConfig
from ..ir.derive import expr_dtype
from ..ir.exprs import Expr, Literal, MLCall
from ..ir.schema import matrix
from .base import ActionContext, RewriteAction
from .expr_utils import transform_calls


def filter_matrix(filters: np.ndarray) -> Literal:
    """Concatenated filter bank as a (fh*fw, f) weight-matrix literal."""
    f, fh, fw = filters.shape
    w = filters.reshape(f, fh * fw).T
    return Literal(tuple(tuple(float(x) for x in row) for row in w), matrix(fh * fw, f))


class ConvNN2MatMul(RewriteAction):
    """Replace conv2d with a matrix multiply of the im2col-flattened image
    against the concatenated filter matrix. The lowering is recorded in the
    call's attrs so the executor materializes the patch matrix; the result
    is bit-compatible with direct convolution up to float summation order."""

    name = "ConvNN2MatMul"

    def rewrite_expr(self, expr: Expr, ctx: ActionContext):
        schema = ctx.child_schema()

        def visit(call: MLCall, path: tuple):
            if call.fn != mlfuncs.CONV2D:
                return None
            filters = np.asarray(ctx.models.arrays(call.attrs.model_id)["filters"], dtype=np.float64)
            f, fh, fw = filters.shape
            if schema is not None:
                img_dt = expr_dtype(call.args[0], schema)
                if img_dt.base != "matrix":
                    raise UnsupportedConvConfig(f"conv2d input is {img_dt}, not an image matrix")
                h, w = img_dt.dims
                if fh > h or fw > w:
                    raise UnsupportedConvConfig(f"filter {fh}x{fw} larger than image {h}x{w}")
            return MLCall(
                mlfuncs.MATRIX_MULTIPLY,
                (call.args[0], filter_matrix(filters)),
                call.attrs.with_(
                    kernel_mode=call.attrs.kernel_mode or "dense",
                    im2col=(fh, fw),
                    weight_shape=(fh * fw, f),
                    filter_spec=(f, fh, fw),
                ),
            )

        return transform_calls(expr, visit)
