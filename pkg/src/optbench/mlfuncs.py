"""ML function catalog: identifiers, arities, and static output typing.

Kept free of kernel implementations so the plan IR can type-check MLCall
expressions without importing the execution backends.
"""

from __future__ import annotations

from .errors import ArityMismatch, ShapeMismatch, ValidationError
from .ir.schema import FLOAT64, INT64, STRING, DType, vector

MATRIX_MULTIPLY = "matrix_multiply"
MATRIX_ADDITION = "matrix_addition"
CONV2D = "conv2d"
SOFTMAX = "softmax"
SIGMOID = "sigmoid"
RELU = "relu"
DISTANCE = "distance"
COSINE_SIM = "cosine_sim"
ARGMAX = "argmax"
FUSED_DNN = "fused_dnn"
MIN_MAX_SCALER = "min_max_scaler"
ONE_HOT_ENCODER = "one_hot_encoder"
KMEANS = "kmeans"
NAIVE_BAYES = "naive_bayes"
LLM = "llm"
DECISION_TREE = "decision_tree"
DECISION_FOREST = "decision_forest"

ALL_FUNCTIONS = (
    MATRIX_MULTIPLY,
    MATRIX_ADDITION,
    CONV2D,
    SOFTMAX,
    SIGMOID,
    RELU,
    DISTANCE,
    COSINE_SIM,
    ARGMAX,
    FUSED_DNN,
    MIN_MAX_SCALER,
    ONE_HOT_ENCODER,
    KMEANS,
    NAIVE_BAYES,
    LLM,
    DECISION_TREE,
    DECISION_FOREST,
)

# fn -> (min_args, max_args or None for unbounded)
_ARITY = {
    MATRIX_MULTIPLY: (2, None),
    MATRIX_ADDITION: (2, 2),
    CONV2D: (1, 1),
    SOFTMAX: (1, 1),
    SIGMOID: (1, 1),
    RELU: (1, 1),
    DISTANCE: (2, 2),
    COSINE_SIM: (2, 2),
    ARGMAX: (1, 1),
    FUSED_DNN: (1, None),
    MIN_MAX_SCALER: (1, None),
    ONE_HOT_ENCODER: (1, 1),
    KMEANS: (1, None),
    NAIVE_BAYES: (1, 1),
    LLM: (1, None),
    DECISION_TREE: (1, None),
    DECISION_FOREST: (1, None),
}


def check_arity(fn: str, n_args: int) -> None:
    if fn not in _ARITY:
        raise ValidationError(f"unknown ML function {fn!r}")
    lo, hi = _ARITY[fn]
    if n_args < lo or (hi is not None and n_args > hi):
        expected = str(lo) if hi == lo else f"{lo}..{hi or 'n'}"
        raise ArityMismatch(fn, expected, n_args)


def feature_width(dtypes: list[DType]) -> int:
    """Total float-feature width of concatenated scalar/vector arguments."""
    return sum(dt.width for dt in dtypes)


def _require_feature_args(fn: str, dtypes: list[DType]) -> int:
    for dt in dtypes:
        if not (dt.is_numeric_scalar or dt.base == "vector"):
            raise ShapeMismatch(f"{fn}: feature arg must be numeric scalar or vector, got {dt}")
    return feature_width(dtypes)


def _squeeze(dim: int) -> DType:
    return FLOAT64 if dim == 1 else vector(dim)


def output_dtype(fn: str, arg_dtypes: list[DType], attrs) -> DType:
    """Static result dtype of an MLCall; raises on malformed calls."""
    check_arity(fn, len(arg_dtypes))

    if fn == MATRIX_MULTIPLY:
        w = arg_dtypes[-1]
        if w.base != "matrix":
            raise ShapeMismatch(f"matrix_multiply weight operand must be a matrix, got {w}")
        rows, cols = w.dims
        if attrs.im2col is not None:
            if len(arg_dtypes) != 2 or arg_dtypes[0].base != "matrix":
                raise ShapeMismatch("im2col matmul takes a single matrix image argument")
            fh, fw = attrs.im2col
            h, wid = arg_dtypes[0].dims
            if fh > h or fw > wid:
                raise ShapeMismatch(f"filter {fh}x{fw} larger than image {h}x{wid}")
            if rows != fh * fw:
                raise ShapeMismatch("filter matrix rows must equal filter height*width")
            return vector(cols * (h - fh + 1) * (wid - fw + 1))
        width = _require_feature_args(fn, arg_dtypes[:-1])
        if width != rows:
            raise ShapeMismatch(f"matrix_multiply: {width} features vs {rows} weight rows")
        return _squeeze(cols)

    if fn == MATRIX_ADDITION:
        a, b = arg_dtypes
        if a.is_numeric_scalar and b.is_numeric_scalar:
            return FLOAT64
        if a.base == "vector" and b.base == "vector" and a.dims == b.dims:
            return a
        raise ShapeMismatch(f"matrix_addition: incompatible {a} and {b}")

    if fn == CONV2D:
        img = arg_dtypes[0]
        if img.base != "matrix":
            raise ShapeMismatch(f"conv2d input must be a matrix image, got {img}")
        if attrs.filter_spec is None:
            raise ValidationError("conv2d requires attrs.filter_spec")
        count, fh, fw = attrs.filter_spec
        h, w = img.dims
        if fh > h or fw > w:
            raise ShapeMismatch(f"filter {fh}x{fw} larger than image {h}x{w}")
        return vector(count * (h - fh + 1) * (w - fw + 1))

    if fn in (SOFTMAX, SIGMOID, RELU):
        dt = arg_dtypes[0]
        if dt.base == "vector":
            return dt
        if dt.is_numeric_scalar:
            if fn == SOFTMAX:
                raise ShapeMismatch("softmax input must be a vector")
            return FLOAT64
        raise ShapeMismatch(f"{fn}: numeric input required, got {dt}")

    if fn in (DISTANCE, COSINE_SIM):
        a, b = arg_dtypes
        if a.base != "vector" or a != b:
            raise ShapeMismatch(f"{fn}: two equal-dim vectors required, got {a}, {b}")
        return FLOAT64

    if fn == ARGMAX:
        if arg_dtypes[0].base != "vector":
            raise ShapeMismatch("argmax input must be a vector")
        return INT64

    if fn == FUSED_DNN:
        if not attrs.layer_spec:
            raise ValidationError("fused_dnn requires attrs.layer_spec")
        width = _require_feature_args(fn, arg_dtypes)
        if width != attrs.layer_spec[0].in_dim:
            raise ShapeMismatch(
                f"fused_dnn: {width} features vs layer-0 input dim {attrs.layer_spec[0].in_dim}"
            )
        for a, b in zip(attrs.layer_spec, attrs.layer_spec[1:]):
            if a.out_dim != b.in_dim:
                raise ShapeMismatch("fused_dnn: adjacent layer dims do not chain")
        return _squeeze(attrs.layer_spec[-1].out_dim)

    if fn == MIN_MAX_SCALER:
        return vector(_require_feature_args(fn, arg_dtypes))

    if fn == ONE_HOT_ENCODER:
        if arg_dtypes[0].base not in ("int64", "string"):
            raise ShapeMismatch("one_hot_encoder input must be int64 or string")
        if not attrs.out_dim:
            raise ValidationError("one_hot_encoder requires attrs.out_dim (vocabulary size)")
        return vector(attrs.out_dim)

    if fn == KMEANS:
        _require_feature_args(fn, arg_dtypes)
        return INT64

    if fn == NAIVE_BAYES:
        if arg_dtypes[0] != STRING:
            raise ShapeMismatch("naive_bayes input must be a string document")
        return INT64

    if fn == LLM:
        if arg_dtypes[0] != STRING:
            raise ShapeMismatch("llm first argument must be a string prompt")
        return STRING

    if fn in (DECISION_TREE, DECISION_FOREST):
        feats = arg_dtypes
        if fn == DECISION_TREE and attrs.tree_index_from_arg:
            if arg_dtypes[-1] != INT64:
                raise ShapeMismatch("tree index argument must be int64")
            feats = arg_dtypes[:-1]
        if attrs.tree_spec is None:
            raise ValidationError(f"{fn} requires attrs.tree_spec")
        _require_feature_args(fn, feats)
        return FLOAT64

    raise ValidationError(f"unknown ML function {fn!r}")
