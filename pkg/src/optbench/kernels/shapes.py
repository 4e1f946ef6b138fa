"""Shape / parameter-count / FLOPS introspection for ML operator calls.

Per-call figures are per input row (a feature-vector matmul is 1xK @ KxN).
The exact per-function formulas are documented in docs/ml-functions.md; the
matmul and fused-inference counts are pinned by tests against an explicit
multiply-add enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .. import mlfuncs
from ..errors import MissingStats, UnknownModel, ValidationError
from ..ir.exprs import ForestSpec, MLAttrs, TreeSpec
from ..ir.schema import DType
from .models import ModelStore

LLM_FLOPS = 1e6  # black-box call; fixed nominal cost
NAIVE_BAYES_TOKEN_ESTIMATE = 32


@dataclass(frozen=True)
class ShapeInfo:
    out_shape: Optional[tuple[int, ...]]
    num_parameters: int
    flops: float
    forest_num_trees: Optional[int] = None


def _tree_counts(tree: TreeSpec) -> tuple[int, int]:
    internal = tree.internal_count
    leaves = len(tree.nodes) - internal
    return internal, leaves


def get_shape(
    fn: str,
    attrs: MLAttrs,
    models: ModelStore,
    arg_dtypes: Optional[list[DType]] = None,
) -> ShapeInfo:
    """Static cost/shape figures for one call.

    `arg_dtypes` refines input-dependent figures (im2col window counts,
    feature widths); figures that need it raise MissingStats when absent.
    """
    if fn == mlfuncs.MATRIX_MULTIPLY:
        if attrs.im2col is not None:
            if arg_dtypes is None or arg_dtypes[0].base != "matrix":
                raise MissingStats("im2col matmul flops need the image dtype")
            fh, fw = attrs.im2col
            h, w = arg_dtypes[0].dims
            windows = (h - fh + 1) * (w - fw + 1)
            rows, cols = _weight_shape(attrs, arg_dtypes)
            return ShapeInfo((cols * windows,), rows * cols, 2.0 * windows * rows * cols)
        rows, cols = _weight_shape(attrs, arg_dtypes)
        params = rows * cols + (attrs.bias_shape or 0)
        return ShapeInfo((cols,), params, 2.0 * rows * cols)

    if fn == mlfuncs.MATRIX_ADDITION:
        dim = attrs.bias_shape or (_feature_width(arg_dtypes) if arg_dtypes else None)
        if dim is None:
            raise MissingStats("matrix_addition flops need an operand width")
        return ShapeInfo((dim,), 0, float(dim))

    if fn == mlfuncs.CONV2D:
        if attrs.filter_spec is not None:
            count, fh, fw = attrs.filter_spec
        else:
            filters = models.arrays(_model_id(attrs))["filters"]
            count, fh, fw = filters.shape
        params = count * fh * fw
        if arg_dtypes and arg_dtypes[0].base == "matrix":
            h, w = arg_dtypes[0].dims
            windows = (h - fh + 1) * (w - fw + 1)
            return ShapeInfo((count * windows,), params, 2.0 * windows * fh * fw * count)
        return ShapeInfo(None, params, 2.0 * fh * fw * count)

    if fn in (mlfuncs.SOFTMAX, mlfuncs.SIGMOID, mlfuncs.RELU, mlfuncs.ARGMAX):
        dim = _first_width(arg_dtypes)
        factor = {"softmax": 3.0, "sigmoid": 4.0, "relu": 1.0, "argmax": 1.0}[fn]
        shape = None if dim is None else ((dim,) if fn != mlfuncs.ARGMAX else ())
        return ShapeInfo(shape, 0, factor * (dim or 1))

    if fn in (mlfuncs.DISTANCE, mlfuncs.COSINE_SIM):
        dim = _first_width(arg_dtypes) or 1
        return ShapeInfo((), 0, (3.0 if fn == mlfuncs.DISTANCE else 6.0) * dim)

    if fn == mlfuncs.FUSED_DNN:
        if not attrs.layer_spec:
            raise ValidationError("fused_dnn requires attrs.layer_spec")
        params = sum(l.in_dim * l.out_dim + l.out_dim for l in attrs.layer_spec)
        flops = sum(2.0 * l.in_dim * l.out_dim + l.out_dim for l in attrs.layer_spec)
        return ShapeInfo((attrs.layer_spec[-1].out_dim,), params, flops)

    if fn == mlfuncs.MIN_MAX_SCALER:
        arrays = models.arrays(_model_id(attrs))
        dim = len(arrays["mins"])
        return ShapeInfo((dim,), 2 * dim, 2.0 * dim)

    if fn == mlfuncs.ONE_HOT_ENCODER:
        size = attrs.out_dim or models.arrays(_model_id(attrs))["size"]
        return ShapeInfo((size,), size, 1.0)

    if fn == mlfuncs.KMEANS:
        cents = models.arrays(_model_id(attrs))["centroids"]
        k, dim = cents.shape
        return ShapeInfo((), k * dim, 3.0 * k * dim)

    if fn == mlfuncs.NAIVE_BAYES:
        payload = models.get(_model_id(attrs))
        n_classes = len(payload["log_priors"])
        vocab = len(payload["token_log_probs"])
        return ShapeInfo((), vocab * n_classes + n_classes, 2.0 * NAIVE_BAYES_TOKEN_ESTIMATE * n_classes)

    if fn == mlfuncs.LLM:
        return ShapeInfo((), 0, LLM_FLOPS)

    if fn in (mlfuncs.DECISION_TREE, mlfuncs.DECISION_FOREST):
        spec = attrs.tree_spec
        if spec is None:
            raise ValidationError(f"{fn} requires attrs.tree_spec")
        if isinstance(spec, TreeSpec):
            internal, leaves = _tree_counts(spec)
            return ShapeInfo((), 2 * internal + leaves, float(internal))
        internal = sum(t.internal_count for t in spec.trees)
        leaves = sum(len(t.nodes) - t.internal_count for t in spec.trees)
        per_row_flops = float(internal) if fn == mlfuncs.DECISION_FOREST else float(internal) / len(spec.trees)
        return ShapeInfo((), 2 * internal + leaves, per_row_flops, forest_num_trees=len(spec.trees))

    raise ValidationError(f"unknown ML function {fn!r}")


def _model_id(attrs: MLAttrs) -> str:
    if attrs.model_id is None:
        raise UnknownModel(None)
    return attrs.model_id


def _weight_shape(attrs: MLAttrs, arg_dtypes) -> tuple[int, int]:
    if attrs.weight_shape is not None:
        return attrs.weight_shape
    if arg_dtypes and arg_dtypes[-1].base == "matrix":
        return arg_dtypes[-1].dims
    raise MissingStats("matrix_multiply flops need a weight shape")


def _feature_width(arg_dtypes) -> Optional[int]:
    try:
        return mlfuncs.feature_width(arg_dtypes)
    except Exception:
        return None


def _first_width(arg_dtypes) -> Optional[int]:
    if not arg_dtypes:
        return None
    dt = arg_dtypes[0]
    return dt.dims[0] if dt.base == "vector" else 1
