"""Fusion of nested affine+activation call chains into one inference operator.

The matched pattern per layer is `act(matrix_addition(matrix_multiply(core,
W), b))` with `act` in {relu, sigmoid, softmax} or absent (identity), W and
b literal. A chain of at least `min_layers` such layers collapses into a
single fused call whose layer list is ordered innermost-first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .. import mlfuncs
from ..ir.exprs import Expr, LayerSpec, Literal, MLCall
from .base import ActionContext, RewriteAction
from .expr_utils import transform_calls

_ACTIVATIONS = (mlfuncs.RELU, mlfuncs.SIGMOID, mlfuncs.SOFTMAX)


@dataclass
class _Layer:
    weights: tuple
    bias: tuple
    activation: str


def _literal_bias(e: Expr) -> Optional[tuple]:
    if not isinstance(e, Literal):
        return None
    if e.dtype.base == "vector":
        return tuple(e.value)
    if e.dtype.base == "float64":
        return (float(e.value),)
    if e.dtype.base == "int64":
        return (float(e.value),)
    return None


def _match_layer(e: Expr) -> Optional[tuple[_Layer, tuple[Expr, ...]]]:
    """Match act(add(mul(core..., W), b)); returns the layer and core args."""
    activation = "identity"
    if isinstance(e, MLCall) and e.fn in _ACTIVATIONS and len(e.args) == 1:
        activation = e.fn
        e = e.args[0]
    if not (isinstance(e, MLCall) and e.fn == mlfuncs.MATRIX_ADDITION):
        return None
    mm, b = e.args
    bias = _literal_bias(b)
    if bias is None:
        return None
    if not (isinstance(mm, MLCall) and mm.fn == mlfuncs.MATRIX_MULTIPLY and mm.attrs.im2col is None):
        return None
    w = mm.args[-1]
    if not (isinstance(w, Literal) and w.dtype.base == "matrix"):
        return None
    if len(bias) != w.dtype.dims[1]:
        return None
    layer = _Layer(weights=w.value, bias=bias, activation=activation)
    return layer, mm.args[:-1]


def parse_chain(expr: Expr) -> Optional[tuple[list[_Layer], tuple[Expr, ...]]]:
    """Longest affine chain ending at `expr`; layers outermost-first."""
    layers: list[_Layer] = []
    core: tuple[Expr, ...] = (expr,)
    e = expr
    while True:
        m = _match_layer(e)
        if m is None:
            break
        layer, core_args = m
        layers.append(layer)
        core = core_args
        if len(core_args) != 1:
            break  # innermost layer reached: multiple feature inputs
        e = core_args[0]
    if not layers:
        return None
    return layers, core


class FuseAffineChain(RewriteAction):
    """Template behind the two fusion actions; `min_layers` selects the
    two-layer or the deeper multi-layer variant."""

    name = "FuseAffineChain"

    @classmethod
    def default_params(cls):
        return {"min_layers": 2}

    def rewrite_expr(self, expr: Expr, ctx: ActionContext):
        min_layers = self.params["min_layers"]

        def visit(call: MLCall, path: tuple):
            parsed = parse_chain(call)
            if parsed is None:
                return None
            layers, core = parsed
            if len(layers) < min_layers:
                return None
            spec = tuple(
                LayerSpec(weights=l.weights, bias=l.bias, activation=l.activation)
                for l in reversed(layers)
            )
            return MLCall(mlfuncs.FUSED_DNN, core, call.attrs.with_(
                kernel_mode=None, weight_shape=None, bias_shape=None, layer_spec=spec))

        return transform_calls(expr, visit)


def fuse_two_layer() -> FuseAffineChain:
    return FuseAffineChain(name="Fuse2TorchNN", params={"min_layers": 2})


def fuse_multi_layer() -> FuseAffineChain:
    return FuseAffineChain(name="MultiLayerUDF2TorchNN", params={"min_layers": 3})
