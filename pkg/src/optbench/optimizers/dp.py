"""Depth-bounded dynamic-programming plan enumeration.

Breadth-first frontier expansion: at each depth every applicable action is
applied to every frontier plan, candidates are scored under the cost model,
and the lowest cost per canonical-hash state is memoized. The global best
(the input plan is always a candidate) is returned with a replayable trace.
An optional frontier cap keeps only the lowest-cost states per depth.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from ..actions.base import ActionContext, apply_plan_rewrite
from ..errors import ValidationError
from ..ir.hashing import canonical_hash
from ..ir.nodes import PlanNode
from .cost import CostModel
from .rules import ActionRef
from .trace import AppliedAction, DecisionTrace


@dataclass(frozen=True)
class DPConfig:
    depth_budget: int = 2
    actions: tuple[ActionRef, ...] = ()
    frontier_cap: Optional[int] = None
    cost_model: str = "default"

    def __post_init__(self):
        if self.depth_budget < 0:
            raise ValidationError("depth budget must be >= 0")
        if not self.actions:
            raise ValidationError("DP config needs a non-empty action set")

    def to_doc(self) -> dict:
        return {
            "depth_budget": self.depth_budget,
            "actions": [a.to_doc() for a in self.actions],
            "frontier_cap": self.frontier_cap,
            "cost_model": self.cost_model,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "DPConfig":
        actions = []
        for a in doc.get("actions", []):
            if isinstance(a, str):
                actions.append(ActionRef(a))
            else:
                actions.append(ActionRef(a["action"], dict(a.get("params", {}))))
        return cls(
            depth_budget=int(doc.get("depth_budget", 2)),
            actions=tuple(actions),
            frontier_cap=doc.get("frontier_cap"),
            cost_model=doc.get("cost_model", "default"),
        )


@dataclass
class _State:
    plan: PlanNode
    cost: float
    seq: tuple[ActionRef, ...] = ()


def run_dp_optimizer(
    config: DPConfig,
    plan: PlanNode,
    catalog,
    action_registry,
    stats_config,
    cache=None,
    cost_model: CostModel | None = None,
) -> tuple[PlanNode, DecisionTrace]:
    from ..stats.collect import collect_stats

    for ref in config.actions:
        action_registry.get(ref.action)  # raises UnknownAction early
    model = cost_model or CostModel()
    trace = DecisionTrace(input_hash=canonical_hash(plan))
    t0 = time.perf_counter()

    def score(p: PlanNode) -> float:
        return model.score(p, collect_stats(p, catalog, stats_config, cache))

    best = _State(plan, score(plan))
    best_hash = canonical_hash(plan)
    trace.plan_scored(best_hash, best.cost)
    trace.best_updated(best_hash, best.cost)
    memo: dict[int, float] = {best_hash: best.cost}
    frontier: list[_State] = [_State(plan, best.cost)]

    for _ in range(config.depth_budget):
        next_by_hash: dict[int, _State] = {}
        for state in frontier:
            stats = collect_stats(state.plan, catalog, stats_config, cache)
            for ref in config.actions:
                action = action_registry.get(ref.action).with_params(ref.params)
                ctx = ActionContext(stats=stats, catalog=catalog)
                modified, candidate = apply_plan_rewrite(action, state.plan, ctx)
                if not modified:
                    continue
                h = canonical_hash(candidate)
                cost = score(candidate)
                trace.plan_scored(h, cost)
                if h in memo and memo[h] <= cost:
                    trace.plan_pruned(h)
                    continue
                memo[h] = cost
                new_state = _State(candidate, cost, state.seq + (ref,))
                next_by_hash[h] = new_state
                better = cost < best.cost or (
                    cost == best.cost and (len(new_state.seq), h) < (len(best.seq), best_hash)
                )
                if better:
                    best, best_hash = new_state, h
                    trace.best_updated(h, cost)
        candidates = sorted(next_by_hash.items(), key=lambda kv: (kv[1].cost, kv[0]))
        if config.frontier_cap is not None and len(candidates) > config.frontier_cap:
            for h, _ in candidates[config.frontier_cap:]:
                trace.plan_pruned(h)
            candidates = candidates[: config.frontier_cap]
        if not candidates:
            break
        frontier = [s for _, s in candidates]

    trace.applied = [AppliedAction(r.action, dict(action_registry.get(r.action).with_params(r.params).params))
                     for r in best.seq]
    trace.final_cost = best.cost
    trace.output_hash = best_hash
    trace.elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return best.plan, trace


def brute_force_best_cost(
    config: DPConfig,
    plan: PlanNode,
    catalog,
    action_registry,
    stats_config,
    cache=None,
    cost_model: CostModel | None = None,
) -> float:
    """Minimum cost over all action sequences of length <= depth_budget.

    Exhaustive oracle for the DP search; same cost model and stats path.
    """
    from ..stats.collect import collect_stats

    model = cost_model or CostModel()

    def score(p: PlanNode) -> float:
        return model.score(p, collect_stats(p, catalog, stats_config, cache))

    best_cost = score(plan)
    seen: set[tuple[int, int]] = set()

    def rec(p: PlanNode, depth: int):
        nonlocal best_cost
        h = canonical_hash(p)
        if (h, depth) in seen:
            return
        seen.add((h, depth))
        if depth == 0:
            return
        stats = collect_stats(p, catalog, stats_config, cache)
        for ref in config.actions:
            action = action_registry.get(ref.action).with_params(ref.params)
            ctx = ActionContext(stats=stats, catalog=catalog)
            modified, candidate = apply_plan_rewrite(action, p, ctx)
            if not modified:
                continue
            best_cost = min(best_cost, score(candidate))
            rec(candidate, depth - 1)

    rec(plan, config.depth_budget)
    return best_cost
