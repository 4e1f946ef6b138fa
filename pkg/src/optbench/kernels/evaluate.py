"""Batch evaluation of ML operator calls.

The executor evaluates whole column batches; `eval_ml` is the single-value
wrapper over the same code path. Constant operands (weight matrices, prompt
literals) are passed as `Const` so kernels avoid materializing them per row.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .. import mlfuncs
from ..errors import NonFiniteInput, ShapeMismatch, UnknownModel, ValidationError
from ..ir.exprs import ForestSpec, MLAttrs, TreeSpec
from . import backend
from .models import ModelStore


@dataclass(frozen=True)
class Const:
    """Unbatched constant operand (one value shared by every row)."""

    value: object


def as_batch(arg, n: int) -> np.ndarray:
    """Materialize an operand as a batch array of n rows."""
    if isinstance(arg, Const):
        v = arg.value
        if isinstance(v, str):
            out = np.empty(n, dtype=object)
            out[:] = v
            return out
        arr = np.asarray(v, dtype=np.float64)
        return np.broadcast_to(arr, (n,) + arr.shape)
    return arg


def _const_matrix(arg) -> np.ndarray:
    if isinstance(arg, Const):
        arr = np.asarray(arg.value, dtype=np.float64)
        if arr.ndim == 2:
            return arr
    raise ShapeMismatch("weight operand must be a constant matrix")


def concat_features(args, n: int) -> np.ndarray:
    """Concatenate scalar/vector operands into an (n, D) float feature block."""
    parts = []
    for a in args:
        arr = as_batch(a, n)
        if arr.dtype == object:
            raise ShapeMismatch("string operand cannot be a feature")
        arr = arr.astype(np.float64, copy=False)
        if arr.ndim == 1:
            parts.append(arr[:, None])
        elif arr.ndim == 2:
            parts.append(arr)
        else:
            raise ShapeMismatch(f"feature operand has rank {arr.ndim}")
    x = parts[0] if len(parts) == 1 else np.concatenate(parts, axis=1)
    if not np.isfinite(x).all():
        raise NonFiniteInput("non-finite value in feature input")
    return x


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=-1, keepdims=True)


def apply_activation(name: str, x: np.ndarray) -> np.ndarray:
    if name == "identity":
        return x
    if name == "relu":
        return np.maximum(x, 0.0)
    if name == "sigmoid":
        return _sigmoid(x)
    if name == "softmax":
        return _softmax(x)
    raise ValidationError(f"unknown activation {name!r}")


_TREE_ARRAY_CACHE: dict[TreeSpec, tuple] = {}


def tree_arrays(tree: TreeSpec) -> tuple:
    cached = _TREE_ARRAY_CACHE.get(tree)
    if cached is None:
        cached = (
            np.array([n.feature for n in tree.nodes], dtype=np.int64),
            np.array([n.threshold for n in tree.nodes], dtype=np.float64),
            np.array([n.left for n in tree.nodes], dtype=np.int64),
            np.array([n.right for n in tree.nodes], dtype=np.int64),
            np.array([n.value for n in tree.nodes], dtype=np.float64),
        )
        _TREE_ARRAY_CACHE[tree] = cached
    return cached


def predict_tree(tree: TreeSpec, x: np.ndarray) -> np.ndarray:
    feat, thr, left, right, val = tree_arrays(tree)
    if x.shape[1] <= feat.max(initial=-1):
        raise ShapeMismatch(f"tree splits on feature {feat.max()} but input has {x.shape[1]}")
    return backend.tree_predict(np.ascontiguousarray(x), feat, thr, left, right, val)


def aggregate_forest(per_tree: np.ndarray, aggregation: str) -> np.ndarray:
    """Combine a (trees, rows) prediction matrix; ties in majority go to the smallest value."""
    if aggregation == "mean":
        return per_tree.sum(axis=0) / per_tree.shape[0]
    if aggregation == "sum":
        return per_tree.sum(axis=0)
    out = np.empty(per_tree.shape[1], dtype=np.float64)
    for i in range(per_tree.shape[1]):
        counts = Counter(per_tree[:, i])
        best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
        out[i] = best[0]
    return out


def _matmul(x: np.ndarray, w: np.ndarray, kernel_mode) -> np.ndarray:
    if kernel_mode == "sparse":
        return backend.csr_matmul(np.ascontiguousarray(x), np.ascontiguousarray(w))
    return backend.dense_matmul(x, w)


def _im2col(images: np.ndarray, fh: int, fw: int) -> np.ndarray:
    """(n, h, w) -> (n, oh*ow, fh*fw) patch matrix, window-major rows."""
    n, h, w = images.shape
    if fh > h or fw > w:
        raise ShapeMismatch(f"filter {fh}x{fw} larger than image {h}x{w}")
    windows = np.lib.stride_tricks.sliding_window_view(images, (fh, fw), axis=(1, 2))
    oh, ow = h - fh + 1, w - fw + 1
    return windows.reshape(n, oh * ow, fh * fw)


def _squeeze_cols(out: np.ndarray) -> np.ndarray:
    return out[:, 0] if out.shape[1] == 1 else out


def batch_eval_ml(fn: str, args: list, attrs: MLAttrs, models: ModelStore, n: int) -> np.ndarray:
    """Evaluate one ML call over an n-row batch.

    `args` entries are batch arrays (leading n axis) or `Const` operands.
    """
    mlfuncs.check_arity(fn, len(args))

    if fn == mlfuncs.MATRIX_MULTIPLY:
        w = _const_matrix(args[-1])
        if attrs.im2col is not None:
            images = as_batch(args[0], n).astype(np.float64, copy=False)
            fh, fw = attrs.im2col
            patches = _im2col(images, fh, fw)
            if patches.shape[2] != w.shape[0]:
                raise ShapeMismatch("filter matrix rows must equal patch size")
            flat = patches.reshape(-1, patches.shape[2])
            prod = _matmul(flat, w, attrs.kernel_mode)
            prod = prod.reshape(n, patches.shape[1], w.shape[1])
            # filter-major flattening, matching direct conv2d output order
            return prod.transpose(0, 2, 1).reshape(n, -1)
        x = concat_features(args[:-1], n)
        if x.shape[1] != w.shape[0]:
            raise ShapeMismatch(f"matmul: {x.shape[1]} features vs {w.shape[0]} weight rows")
        return _squeeze_cols(_matmul(x, w, attrs.kernel_mode))

    if fn == mlfuncs.MATRIX_ADDITION:
        a = as_batch(args[0], n).astype(np.float64, copy=False)
        b = as_batch(args[1], n).astype(np.float64, copy=False)
        if a.shape != b.shape:
            raise ShapeMismatch(f"matrix_addition: {a.shape} vs {b.shape}")
        return a + b

    if fn == mlfuncs.CONV2D:
        images = as_batch(args[0], n).astype(np.float64, copy=False)
        filters = _conv_filters(attrs, models)
        if filters.shape[1] > images.shape[1] or filters.shape[2] > images.shape[2]:
            raise ShapeMismatch("filter larger than image")
        if not np.isfinite(images).all():
            raise NonFiniteInput("non-finite value in image input")
        return backend.conv2d(np.ascontiguousarray(images), filters)

    if fn in (mlfuncs.SOFTMAX, mlfuncs.SIGMOID, mlfuncs.RELU):
        x = as_batch(args[0], n).astype(np.float64, copy=False)
        if fn == mlfuncs.SOFTMAX:
            if x.ndim != 2:
                raise ShapeMismatch("softmax input must be a vector")
            return _softmax(x)
        return apply_activation(fn, x)

    if fn in (mlfuncs.DISTANCE, mlfuncs.COSINE_SIM):
        a = as_batch(args[0], n).astype(np.float64, copy=False)
        b = as_batch(args[1], n).astype(np.float64, copy=False)
        if a.shape != b.shape or a.ndim != 2:
            raise ShapeMismatch(f"{fn}: two equal-dim vector batches required")
        if fn == mlfuncs.DISTANCE:
            if (attrs.metric or "l2") == "l1":
                return np.abs(a - b).sum(axis=1)
            return np.sqrt(((a - b) ** 2).sum(axis=1))
        dots = (a * b).sum(axis=1)
        norms = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
        out = np.zeros(n, dtype=np.float64)
        nz = norms > 0
        out[nz] = dots[nz] / norms[nz]
        return out

    if fn == mlfuncs.ARGMAX:
        x = as_batch(args[0], n)
        if x.ndim != 2:
            raise ShapeMismatch("argmax input must be a vector")
        return np.argmax(x, axis=1).astype(np.int64)

    if fn == mlfuncs.FUSED_DNN:
        if not attrs.layer_spec:
            raise ValidationError("fused_dnn requires attrs.layer_spec")
        h = concat_features(args, n)
        for layer in attrs.layer_spec:
            w = np.asarray(layer.weights, dtype=np.float64)
            b = np.asarray(layer.bias, dtype=np.float64)
            if h.shape[1] != w.shape[0]:
                raise ShapeMismatch("fused_dnn: layer input dim mismatch")
            h = apply_activation(layer.activation, backend.dense_matmul(h, w) + b)
        return _squeeze_cols(h)

    if fn == mlfuncs.MIN_MAX_SCALER:
        arrays = models.arrays(_model_id(attrs))
        x = concat_features(args, n)
        span = arrays["maxs"] - arrays["mins"]
        out = np.zeros_like(x)
        nz = span != 0
        out[:, nz] = (x[:, nz] - arrays["mins"][nz]) / span[nz]
        return out

    if fn == mlfuncs.ONE_HOT_ENCODER:
        arrays = models.arrays(_model_id(attrs))
        values = as_batch(args[0], n)
        out = np.zeros((n, arrays["size"]), dtype=np.float64)
        index = arrays["index"]
        for i, v in enumerate(values):
            j = index.get(str(int(v)) if not isinstance(v, str) else v)
            if j is not None:
                out[i, j] = 1.0
        return out

    if fn == mlfuncs.KMEANS:
        arrays = models.arrays(_model_id(attrs))
        x = concat_features(args, n)
        cents = arrays["centroids"]
        if x.shape[1] != cents.shape[1]:
            raise ShapeMismatch(f"kmeans: {x.shape[1]} features vs centroid dim {cents.shape[1]}")
        d2 = ((x[:, None, :] - cents[None, :, :]) ** 2).sum(axis=2)
        return np.argmin(d2, axis=1).astype(np.int64)

    if fn == mlfuncs.NAIVE_BAYES:
        arrays = models.arrays(_model_id(attrs))
        docs = as_batch(args[0], n)
        priors = arrays["log_priors"]
        token_lp = arrays["token_log_probs"]
        default = arrays["default_log_prob"]
        out = np.empty(n, dtype=np.int64)
        for i, doc in enumerate(docs):
            scores = priors.copy()
            for tok in str(doc).split():
                scores = scores + token_lp.get(tok, default)
            out[i] = int(np.argmax(scores))
        return out

    if fn == mlfuncs.LLM:
        seed = models.get(_model_id(attrs)).get("seed", 0)
        batched = [as_batch(a, n) for a in args]
        out = np.empty(n, dtype=object)
        for i in range(n):
            out[i] = _llm_mock(seed, [b[i] for b in batched])
        return out

    if fn == mlfuncs.DECISION_TREE:
        spec = attrs.tree_spec
        if spec is None:
            raise ValidationError("decision_tree requires attrs.tree_spec")
        if attrs.tree_index_from_arg:
            if not isinstance(spec, ForestSpec):
                raise ShapeMismatch("tree index argument requires a forest tree_spec")
            idx = as_batch(args[-1], n).astype(np.int64, copy=False)
            x = concat_features(args[:-1], n)
            out = np.empty(n, dtype=np.float64)
            for t in np.unique(idx):
                if t < 0 or t >= len(spec.trees):
                    raise ShapeMismatch(f"tree index {t} out of range")
                sel = idx == t
                out[sel] = predict_tree(spec.trees[t], x[sel])
            return out
        if isinstance(spec, ForestSpec):
            raise ShapeMismatch("decision_tree got a forest spec without a tree index")
        return predict_tree(spec, concat_features(args, n))

    if fn == mlfuncs.DECISION_FOREST:
        spec = attrs.tree_spec
        if not isinstance(spec, ForestSpec):
            raise ValidationError("decision_forest requires a forest tree_spec")
        x = concat_features(args, n)
        per_tree = np.stack([predict_tree(t, x) for t in spec.trees])
        return aggregate_forest(per_tree, spec.aggregation)

    raise ValidationError(f"unknown ML function {fn!r}")


def _model_id(attrs: MLAttrs) -> str:
    if attrs.model_id is None:
        raise UnknownModel(None)
    return attrs.model_id


def _conv_filters(attrs: MLAttrs, models: ModelStore) -> np.ndarray:
    filters = models.arrays(_model_id(attrs))["filters"]
    if attrs.filter_spec is not None and tuple(filters.shape) != tuple(attrs.filter_spec):
        raise ShapeMismatch(
            f"filter bank {filters.shape} does not match declared {attrs.filter_spec}"
        )
    return filters


def _llm_mock(seed: int, row_args) -> str:
    """Deterministic 0/1 verdict from a digest of seed, prompt, and argument bytes."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed).encode())
    for a in row_args:
        if isinstance(a, str):
            h.update(a.encode())
        elif isinstance(a, np.ndarray):
            h.update(np.ascontiguousarray(a, dtype=np.float64).tobytes())
        else:
            h.update(repr(a).encode())
        h.update(b"|")
    return "1" if h.digest()[0] & 1 else "0"


def _single_to_operand(v, as_const: bool):
    """Lift one cell value (scalar / vector / matrix / string) into a batch-of-1 operand."""
    if isinstance(v, Const):
        return v
    if isinstance(v, str):
        return Const(v)
    if isinstance(v, bool):
        return np.array([v])
    if isinstance(v, int):
        return np.array([v], dtype=np.int64)
    if isinstance(v, float):
        return np.array([v], dtype=np.float64)
    arr = np.asarray(v, dtype=np.float64)
    if as_const:
        return Const(arr)
    return arr[None, ...]  # vector -> (1, d); matrix cell -> (1, h, w)


def eval_ml(fn: str, args: list, attrs: MLAttrs = None, models: ModelStore = None):
    """Single-value evaluation; wraps the batch path with n=1.

    The weight operand of `matrix_multiply` (its last argument) is treated
    as a constant; every other array argument is one cell value.
    """
    attrs = attrs or MLAttrs()
    models = models or ModelStore()
    operands = []
    for i, a in enumerate(args):
        is_weight = fn == mlfuncs.MATRIX_MULTIPLY and i == len(args) - 1
        operands.append(_single_to_operand(a, as_const=is_weight))
    out = batch_eval_ml(fn, operands, attrs, models, 1)
    if isinstance(out, np.ndarray) and out.ndim >= 1 and out.shape[0] == 1:
        first = out[0]
        return first.copy() if isinstance(first, np.ndarray) else first
    return out


def conv2d_as_matmul_reference(image: np.ndarray, filters: np.ndarray) -> np.ndarray:
    """Convolution via im2col + matrix multiply; oracle for the conv rewrite.

    image: (h, w); filters: (f, fh, fw). Returns (f, oh, ow).
    """
    image = np.asarray(image, dtype=np.float64)
    filters = np.asarray(filters, dtype=np.float64)
    f, fh, fw = filters.shape
    h, w = image.shape
    if fh > h or fw > w:
        raise ShapeMismatch(f"filter {fh}x{fw} larger than image {h}x{w}")
    patches = _im2col(image[None], fh, fw)[0]  # (oh*ow, fh*fw)
    weight = filters.reshape(f, fh * fw).T  # concatenated filter matrix
    prod = patches @ weight  # (oh*ow, f)
    oh, ow = h - fh + 1, w - fw + 1
    return prod.T.reshape(f, oh, ow)
