"""Rewrite actions: abstraction, applier, and the built-in library."""

from .base import ActionContext, RewriteAction, RewriteDelta, apply_plan_rewrite
from .conv_lowering import ConvNN2MatMul
from .factorization import MLFactorization
from .fuse import FuseAffineChain, fuse_multi_layer, fuse_two_layer, parse_chain
from .kernel_select import MatMulDense2Sparse
from .pruning import Interval, TreeModelPruning, bounds_from_predicate, collect_bounds, prune_tree
from .pushdown import MLDecompositionPushdown
from .registry import ACTION_FORMAT, ActionRegistry, TEMPLATES, builtin_actions
from .relationalize import DecisionForestUDF2Relation, MatMul2Relation, resolve_source

__all__ = [
    "ACTION_FORMAT",
    "ActionContext",
    "ActionRegistry",
    "ConvNN2MatMul",
    "DecisionForestUDF2Relation",
    "FuseAffineChain",
    "Interval",
    "MLDecompositionPushdown",
    "MLFactorization",
    "MatMul2Relation",
    "MatMulDense2Sparse",
    "RewriteAction",
    "RewriteDelta",
    "TEMPLATES",
    "TreeModelPruning",
    "apply_plan_rewrite",
    "bounds_from_predicate",
    "builtin_actions",
    "collect_bounds",
    "fuse_multi_layer",
    "fuse_two_layer",
    "parse_chain",
    "prune_tree",
    "resolve_source",
]
