"""Executable ML kernels with a compiled core and a numpy fallback."""

from . import backend
from .evaluate import (
    Const,
    aggregate_forest,
    apply_activation,
    as_batch,
    batch_eval_ml,
    concat_features,
    conv2d_as_matmul_reference,
    eval_ml,
    predict_tree,
    tree_arrays,
)
from .models import MODEL_FORMAT, ModelStore, validate_payload
from .shapes import LLM_FLOPS, ShapeInfo, get_shape

BACKEND_NAME = backend.NAME

__all__ = [
    "BACKEND_NAME",
    "Const",
    "LLM_FLOPS",
    "MODEL_FORMAT",
    "ModelStore",
    "ShapeInfo",
    "aggregate_forest",
    "apply_activation",
    "as_batch",
    "backend",
    "batch_eval_ml",
    "concat_features",
    "conv2d_as_matmul_reference",
    "eval_ml",
    "get_shape",
    "predict_tree",
    "tree_arrays",
    "validate_payload",
]
