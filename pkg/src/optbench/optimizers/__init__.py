"""Optimizer profiles: registry, rule engine, DP search, cost model, traces."""

from .baselines import push_filters_down, run_filter_pushdown, run_noop
from .cost import DEFAULT_WEIGHTS, CostModel, score_plan
from .dp import DPConfig, brute_force_best_cost, run_dp_optimizer
from .registry import (
    OPTIMIZER_FORMAT,
    OptimizeContext,
    OptimizerProfile,
    OptimizerRegistry,
    SCENARIO_RULE_DOC,
    builtin_registry,
    default_dp_profile,
    parse_optimizer_doc,
)
from .rules import ActionRef, Predicate, Rule, RuleSet, StatComparison, run_rule_based
from .trace import AppliedAction, DecisionTrace, TraceEvent, replay_trace, verify_replay

__all__ = [
    "ActionRef",
    "AppliedAction",
    "CostModel",
    "DEFAULT_WEIGHTS",
    "DPConfig",
    "DecisionTrace",
    "OPTIMIZER_FORMAT",
    "OptimizeContext",
    "OptimizerProfile",
    "OptimizerRegistry",
    "Predicate",
    "Rule",
    "RuleSet",
    "SCENARIO_RULE_DOC",
    "StatComparison",
    "TraceEvent",
    "brute_force_best_cost",
    "builtin_registry",
    "default_dp_profile",
    "parse_optimizer_doc",
    "push_filters_down",
    "replay_trace",
    "run_dp_optimizer",
    "run_filter_pushdown",
    "run_noop",
    "run_rule_based",
    "score_plan",
    "verify_replay",
]
