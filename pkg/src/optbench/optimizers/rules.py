"""Rule DSL and the rule-based optimizer engine.

A rule is a predicate over collected statistics plus an ordered action
list. Predicates are comparisons `statistic op literal` scoped to any node
or to the root, combined with all_of/any_of. Rules fire in priority order
(higher first); passes repeat until a pass produces no structural change or
the pass budget is exhausted. See docs/rule-dsl.md.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from ..actions.base import ActionContext, apply_plan_rewrite
from ..errors import UnknownAction, UnknownStatistic, ValidationError
from ..ir.hashing import canonical_hash
from ..ir.nodes import PlanNode
from ..stats.vector import ALL_STAT_NAMES, StatsVector
from .trace import AppliedAction, DecisionTrace

_OPS = {
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}

DEFAULT_MAX_PASSES = 8


@dataclass(frozen=True)
class StatComparison:
    stat: str
    op: str
    value: float
    scope: str = "any"  # any | root

    def validate(self) -> None:
        if self.stat not in ALL_STAT_NAMES:
            raise UnknownStatistic(self.stat)
        if self.op not in _OPS:
            raise ValidationError(f"unknown comparator {self.op!r}")
        if self.scope not in ("any", "root"):
            raise ValidationError(f"unknown scope {self.scope!r}")

    def evaluate(self, stats: StatsVector) -> tuple[bool, Optional[float]]:
        cmp = _OPS[self.op]
        for v in stats.values_of(self.stat, root_only=self.scope == "root"):
            if cmp(v, self.value):
                return True, v
        return False, None

    def to_doc(self) -> dict:
        return {"stat": self.stat, "op": self.op, "value": self.value, "scope": self.scope}


@dataclass(frozen=True)
class Predicate:
    """all_of/any_of tree with StatComparison leaves."""

    kind: str  # leaf | all_of | any_of
    leaf: Optional[StatComparison] = None
    children: tuple = ()

    def validate(self) -> None:
        if self.kind == "leaf":
            self.leaf.validate()
        else:
            for c in self.children:
                c.validate()

    def evaluate(self, stats: StatsVector) -> tuple[bool, dict]:
        if self.kind == "leaf":
            ok, value = self.leaf.evaluate(stats)
            label = f"{self.leaf.stat}{self.leaf.op}{self.leaf.value}@{self.leaf.scope}"
            return ok, {label: value} if ok else {}
        snapshot: dict = {}
        results = []
        for c in self.children:
            ok, snap = c.evaluate(stats)
            results.append(ok)
            snapshot.update(snap)
        ok = all(results) if self.kind == "all_of" else any(results)
        return ok, snapshot if ok else {}

    def to_doc(self) -> dict:
        if self.kind == "leaf":
            return self.leaf.to_doc()
        return {self.kind: [c.to_doc() for c in self.children]}

    @classmethod
    def from_doc(cls, doc: dict) -> "Predicate":
        if not isinstance(doc, dict):
            raise ValidationError("predicate must be an object")
        if "all_of" in doc or "any_of" in doc:
            kind = "all_of" if "all_of" in doc else "any_of"
            kids = doc[kind]
            if not isinstance(kids, list) or not kids:
                raise ValidationError(f"'{kind}' needs a non-empty list")
            return cls(kind, children=tuple(cls.from_doc(k) for k in kids))
        try:
            leaf = StatComparison(
                stat=doc["stat"], op=doc["op"], value=float(doc["value"]),
                scope=doc.get("scope", "any"),
            )
        except KeyError as e:
            raise ValidationError(f"predicate leaf missing {e}") from e
        return cls("leaf", leaf=leaf)


@dataclass(frozen=True)
class ActionRef:
    action: str
    params: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {"action": self.action, "params": dict(self.params)}


@dataclass(frozen=True)
class Rule:
    name: str
    predicate: Predicate
    actions: tuple[ActionRef, ...]
    priority: int = 0

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "priority": self.priority,
            "predicate": self.predicate.to_doc(),
            "actions": [a.to_doc() for a in self.actions],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Rule":
        if "name" not in doc or "predicate" not in doc or "actions" not in doc:
            raise ValidationError("rule needs 'name', 'predicate', and 'actions'")
        actions = []
        for a in doc["actions"]:
            if isinstance(a, str):
                actions.append(ActionRef(a))
            else:
                actions.append(ActionRef(a["action"], dict(a.get("params", {}))))
        if not actions:
            raise ValidationError(f"rule {doc['name']!r} has no actions")
        return cls(
            name=doc["name"],
            predicate=Predicate.from_doc(doc["predicate"]),
            actions=tuple(actions),
            priority=int(doc.get("priority", 0)),
        )


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    max_passes: int = DEFAULT_MAX_PASSES

    def validate(self, action_registry) -> None:
        for r in self.rules:
            r.predicate.validate()
            for a in r.actions:
                if a.action not in action_registry:
                    raise UnknownAction(a.action)

    def ordered(self) -> list[Rule]:
        return sorted(self.rules, key=lambda r: (-r.priority, r.name))

    def to_doc(self) -> dict:
        return {"rules": [r.to_doc() for r in self.rules], "max_passes": self.max_passes}

    @classmethod
    def from_doc(cls, doc: dict) -> "RuleSet":
        rules = tuple(Rule.from_doc(r) for r in doc.get("rules", []))
        return cls(rules, max_passes=int(doc.get("max_passes", DEFAULT_MAX_PASSES)))


def run_rule_based(
    rules: RuleSet,
    plan: PlanNode,
    catalog,
    action_registry,
    stats_config,
    cache=None,
    cost_model=None,
) -> tuple[PlanNode, DecisionTrace]:
    """Apply firing rules until a pass changes nothing or the budget runs out."""
    from ..stats.collect import collect_stats
    from .cost import CostModel

    rules.validate(action_registry)
    trace = DecisionTrace(input_hash=canonical_hash(plan))
    t0 = time.perf_counter()
    current = plan
    ordered = rules.ordered()

    for _ in range(max(1, rules.max_passes)):
        stats = collect_stats(current, catalog, stats_config, cache)
        pass_changed = False
        for rule in ordered:
            ok, snapshot = rule.predicate.evaluate(stats)
            if not ok:
                continue
            trace.rule_fired(rule.name, snapshot)
            for ref in rule.actions:
                action = action_registry.get(ref.action).with_params(ref.params)
                stats_now = collect_stats(current, catalog, stats_config, cache)
                ctx = ActionContext(stats=stats_now, catalog=catalog)
                modified, current = apply_plan_rewrite(action, current, ctx)
                for delta in ctx.deltas:
                    trace.action_applied(delta)
                if modified:
                    trace.applied.append(AppliedAction(ref.action, dict(action.params)))
                    pass_changed = True
        if not pass_changed:
            break

    final_stats = collect_stats(current, catalog, stats_config, cache)
    trace.final_cost = (cost_model or CostModel()).score(current, final_stats)
    trace.output_hash = canonical_hash(current)
    trace.elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return current, trace
