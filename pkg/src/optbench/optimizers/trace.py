"""Decision traces: replayable logs of one optimization run."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..actions.base import ActionContext, RewriteDelta, apply_plan_rewrite
from ..ir.hashing import canonical_hash
from ..ir.nodes import PlanNode


@dataclass(frozen=True)
class TraceEvent:
    kind: str  # rule-fired | action-applied | plan-scored | plan-pruned | best-updated
    payload: dict


@dataclass
class AppliedAction:
    """One applied rewrite, recorded with enough detail to replay it."""

    action: str
    params: dict

    def to_doc(self) -> dict:
        return {"action": self.action, "params": dict(self.params)}


@dataclass
class DecisionTrace:
    events: list[TraceEvent] = field(default_factory=list)
    applied: list[AppliedAction] = field(default_factory=list)
    final_cost: Optional[float] = None
    input_hash: Optional[int] = None
    output_hash: Optional[int] = None
    elapsed_ms: float = 0.0

    def rule_fired(self, name: str, snapshot: dict) -> None:
        self.events.append(TraceEvent("rule-fired", {"rule": name, "predicate_snapshot": snapshot}))

    def action_applied(self, delta: RewriteDelta) -> None:
        self.events.append(TraceEvent("action-applied", delta.to_doc()))

    def plan_scored(self, plan_hash: int, cost: float) -> None:
        self.events.append(TraceEvent("plan-scored", {"hash": f"{plan_hash:016x}", "cost": cost}))

    def plan_pruned(self, plan_hash: int) -> None:
        self.events.append(TraceEvent("plan-pruned", {"hash": f"{plan_hash:016x}"}))

    def best_updated(self, plan_hash: int, cost: float) -> None:
        self.events.append(TraceEvent("best-updated", {"hash": f"{plan_hash:016x}", "cost": cost}))

    def to_doc(self) -> dict:
        return {
            "events": [{"kind": e.kind, **e.payload} for e in self.events],
            "applied_actions": [a.to_doc() for a in self.applied],
            "final_cost": self.final_cost,
            "input_hash": f"{self.input_hash:016x}" if self.input_hash is not None else None,
            "output_hash": f"{self.output_hash:016x}" if self.output_hash is not None else None,
            "elapsed_ms": self.elapsed_ms,
        }


def replay_trace(trace: DecisionTrace, plan: PlanNode, action_registry, catalog,
                 stats_config, cache=None) -> PlanNode:
    """Re-apply a trace's action sequence; reproduces the output plan hash."""
    from ..stats.collect import collect_stats

    current = plan
    for entry in trace.applied:
        action = action_registry.get(entry.action).with_params(entry.params)
        stats = collect_stats(current, catalog, stats_config, cache)
        ctx = ActionContext(stats=stats, catalog=catalog)
        _, current = apply_plan_rewrite(action, current, ctx)
    return current


def verify_replay(trace: DecisionTrace, plan: PlanNode, action_registry, catalog,
                  stats_config, cache=None) -> bool:
    replayed = replay_trace(trace, plan, action_registry, catalog, stats_config, cache)
    return canonical_hash(replayed) == trace.output_hash
