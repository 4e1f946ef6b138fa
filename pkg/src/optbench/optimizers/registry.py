"""Optimizer profile registration and the upload document format."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from ..actions.registry import ActionRegistry
from ..engine.table import Catalog
from ..errors import DuplicateName, UnknownAction, ValidationError
from ..ir.nodes import PlanNode
from ..stats.collect import StatsCache, StatsConfig
from .baselines import run_filter_pushdown, run_noop
from .cost import CostModel
from .dp import DPConfig, run_dp_optimizer
from .rules import ActionRef, Predicate, Rule, RuleSet, run_rule_based
from .trace import DecisionTrace

OPTIMIZER_FORMAT = "optbench-optimizer/1"

PROFILE_KINDS = ("noop-baseline", "heuristic-baseline", "rule-based", "cost-based-dp", "external")


@dataclass
class OptimizeContext:
    """Everything a profile needs to map (plan, stats) -> plan."""

    catalog: Catalog
    actions: ActionRegistry
    stats_config: StatsConfig = field(default_factory=StatsConfig)
    cache: Optional[StatsCache] = None
    cost_model: CostModel = field(default_factory=CostModel)


@dataclass
class OptimizerProfile:
    name: str
    kind: str
    definition: Union[RuleSet, DPConfig, None] = None
    entry_point: Optional[Callable] = None  # external python entry point
    source_doc: Optional[dict] = None

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValidationError(f"unknown profile kind {self.kind!r}")

    def optimize(self, plan: PlanNode, ctx: OptimizeContext) -> tuple[PlanNode, DecisionTrace]:
        if self.kind == "noop-baseline":
            return run_noop(plan)
        if self.kind == "heuristic-baseline":
            return run_filter_pushdown(plan)
        if self.kind == "rule-based":
            return run_rule_based(
                self.definition, plan, ctx.catalog, ctx.actions,
                ctx.stats_config, ctx.cache, ctx.cost_model,
            )
        if self.kind == "cost-based-dp":
            return run_dp_optimizer(
                self.definition, plan, ctx.catalog, ctx.actions,
                ctx.stats_config, ctx.cache, ctx.cost_model,
            )
        return self.entry_point(plan, ctx)

    def to_doc(self) -> dict:
        doc = {"format": OPTIMIZER_FORMAT, "name": self.name, "kind": self.kind}
        if isinstance(self.definition, RuleSet):
            doc.update(self.definition.to_doc())
        elif isinstance(self.definition, DPConfig):
            doc["dp"] = self.definition.to_doc()
        return doc


class OptimizerRegistry:
    def __init__(self):
        self._profiles: dict[str, OptimizerProfile] = {}
        self._builtin: set[str] = set()

    def register(self, profile: OptimizerProfile, replace: bool = False, builtin: bool = False) -> None:
        if profile.name in self._profiles and not replace:
            raise DuplicateName(profile.name)
        if profile.name in self._builtin and not builtin:
            raise DuplicateName(profile.name)
        self._profiles[profile.name] = profile
        if builtin:
            self._builtin.add(profile.name)

    def get(self, name: str) -> OptimizerProfile:
        if name not in self._profiles:
            raise KeyError(f"unknown optimizer {name!r}")
        return self._profiles[name]

    def __contains__(self, name: str) -> bool:
        return name in self._profiles

    def names(self) -> list[str]:
        builtin = [n for n in self._profiles if n in self._builtin]
        external = sorted(n for n in self._profiles if n not in self._builtin)
        return builtin + external

    def describe(self) -> list[dict]:
        out = []
        for name in self.names():
            p = self._profiles[name]
            entry = {"name": name, "kind": p.kind, "builtin": name in self._builtin}
            if isinstance(p.definition, RuleSet):
                entry["rules"] = [r.name for r in p.definition.rules]
            if isinstance(p.definition, DPConfig):
                entry["depth_budget"] = p.definition.depth_budget
                entry["actions"] = [a.action for a in p.definition.actions]
            out.append(entry)
        return out

    def register_from_doc(self, doc: dict, actions: ActionRegistry, replace: bool = False) -> OptimizerProfile:
        profile = parse_optimizer_doc(doc, actions)
        self.register(profile, replace=replace)
        return profile


def parse_optimizer_doc(doc: dict, actions: ActionRegistry) -> OptimizerProfile:
    """Validate and build a profile from an `optbench-optimizer/1` document."""
    if not isinstance(doc, dict):
        raise ValidationError("optimizer document must be a JSON object")
    if doc.get("format") != OPTIMIZER_FORMAT:
        raise ValidationError(f"expected format {OPTIMIZER_FORMAT!r}, got {doc.get('format')!r}")
    name = doc.get("name")
    if not name or not isinstance(name, str):
        raise ValidationError("optimizer document needs a 'name'")
    kind = doc.get("kind")
    if kind == "rule-based":
        ruleset = RuleSet.from_doc(doc)
        if not ruleset.rules:
            raise ValidationError("rule-based optimizer needs at least one rule")
        ruleset.validate(actions)
        return OptimizerProfile(name=name, kind="rule-based", definition=ruleset, source_doc=doc)
    if kind == "cost-based-dp":
        config = DPConfig.from_doc(doc.get("dp", {}))
        for ref in config.actions:
            if ref.action not in actions:
                raise UnknownAction(ref.action)
        return OptimizerProfile(name=name, kind="cost-based-dp", definition=config, source_doc=doc)
    raise ValidationError(f"uploadable optimizer kind must be rule-based or cost-based-dp, got {kind!r}")


# --- built-in profiles ---

SCENARIO_RULE_DOC = {
    "format": OPTIMIZER_FORMAT,
    "name": "rule-sparse-pushdown",
    "kind": "rule-based",
    "rules": [
        {
            "name": "push-inference-and-sparsify",
            "priority": 10,
            "predicate": {
                "all_of": [
                    {"stat": "est_cardinality", "op": ">", "value": 5000, "scope": "any"},
                    {"stat": "sparsity", "op": ">", "value": 0.7, "scope": "any"},
                ]
            },
            "actions": [
                {"action": "MLDecompositionPushdown"},
                {"action": "MatMulDense2Sparse", "params": {"min_rows": 1000}},
            ],
        }
    ],
    "max_passes": 4,
}


def default_dp_profile(actions: ActionRegistry, depth_budget: int = 2,
                       frontier_cap: Optional[int] = 64) -> OptimizerProfile:
    refs = []
    for name in actions.names():
        params = {}
        if name == "MatMulDense2Sparse":
            params = {"min_rows": 1000}
        refs.append(ActionRef(name, params))
    config = DPConfig(depth_budget=depth_budget, actions=tuple(refs), frontier_cap=frontier_cap)
    return OptimizerProfile(name="DP-CostOpt", kind="cost-based-dp", definition=config)


def builtin_registry(actions: ActionRegistry) -> OptimizerRegistry:
    reg = OptimizerRegistry()
    reg.register(OptimizerProfile(name="no-op", kind="noop-baseline"), builtin=True)
    reg.register(OptimizerProfile(name="heuristic-filter-pushdown", kind="heuristic-baseline"), builtin=True)
    reg.register(parse_optimizer_doc(SCENARIO_RULE_DOC, actions), builtin=True)
    reg.register(default_dp_profile(actions), builtin=True)
    return reg
