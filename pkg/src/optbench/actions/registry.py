"""Built-in action registry and external action definitions.

External definitions (format `optbench-action/1`) parameterize a built-in
transformation template under a new name; arbitrary uploaded code is out of
scope by design.
"""

from __future__ import annotations

from ..errors import UnknownAction, ValidationError
from .base import RewriteAction
from .conv_lowering import ConvNN2MatMul
from .factorization import MLFactorization
from .fuse import FuseAffineChain, fuse_multi_layer, fuse_two_layer
from .kernel_select import MatMulDense2Sparse
from .pruning import TreeModelPruning
from .pushdown import MLDecompositionPushdown
from .relationalize import DecisionForestUDF2Relation, MatMul2Relation

ACTION_FORMAT = "optbench-action/1"


def builtin_actions() -> dict[str, RewriteAction]:
    """The nine built-in rewrite actions, keyed by registry name."""
    actions = [
        MatMulDense2Sparse(),
        DecisionForestUDF2Relation(),
        MatMul2Relation(),
        ConvNN2MatMul(),
        fuse_multi_layer(),
        MLDecompositionPushdown(),
        fuse_two_layer(),
        MLFactorization(),
        TreeModelPruning(),
    ]
    return {a.name: a for a in actions}


TEMPLATES: dict[str, type[RewriteAction]] = {
    "MatMulDense2Sparse": MatMulDense2Sparse,
    "DecisionForestUDF2Relation": DecisionForestUDF2Relation,
    "MatMul2Relation": MatMul2Relation,
    "ConvNN2MatMul": ConvNN2MatMul,
    "FuseAffineChain": FuseAffineChain,
    "MLDecompositionPushdown": MLDecompositionPushdown,
    "MLFactorization": MLFactorization,
    "TreeModelPruning": TreeModelPruning,
}


class ActionRegistry:
    """Named rewrite actions; built-ins are immutable, uploads are namespaced."""

    def __init__(self):
        self._builtin = builtin_actions()
        self._external: dict[str, RewriteAction] = {}

    def names(self) -> list[str]:
        return list(self._builtin) + sorted(self._external)

    def get(self, name: str) -> RewriteAction:
        if name in self._builtin:
            return self._builtin[name]
        if name in self._external:
            return self._external[name]
        raise UnknownAction(name)

    def __contains__(self, name: str) -> bool:
        return name in self._builtin or name in self._external

    def describe(self) -> list[dict]:
        out = []
        for name in self.names():
            d = self.get(name).describe()
            d["builtin"] = name in self._builtin
            out.append(d)
        return out

    def register_external(self, doc: dict) -> RewriteAction:
        """Register an uploaded action definition (template + params)."""
        if doc.get("format") != ACTION_FORMAT:
            raise ValidationError(f"expected format {ACTION_FORMAT!r}, got {doc.get('format')!r}")
        name = doc.get("name")
        if not name or not isinstance(name, str):
            raise ValidationError("action definition needs a 'name'")
        qualified = name if name.startswith("user/") else f"user/{name}"
        if qualified in self._builtin or qualified in self._external:
            raise ValidationError(f"action {qualified!r} already registered")
        template_id = doc.get("template")
        cls = TEMPLATES.get(template_id)
        if cls is None:
            raise UnknownAction(template_id)
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise ValidationError("'params' must be an object")
        defaults = cls.default_params()
        unknown = set(params) - set(defaults)
        if unknown:
            raise ValidationError(f"unknown params for template {template_id!r}: {sorted(unknown)}")
        action = cls(params=params, name=qualified)
        self._external[qualified] = action
        return action
