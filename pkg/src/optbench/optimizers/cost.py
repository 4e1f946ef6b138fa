"""Plan cost model.

cost(plan) = sum over nodes of est_cardinality * per-kind weight
           + sum over ML calls of est_cardinality(owning node) * flops * kernel_factor

where kernel_factor is the sampled nonzero ratio for sparse-annotated
matrix multiplies and 1 otherwise. Lower is better. Weights are pinned by
fixtures; override via `CostModel(weights=...)`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import MissingStats
from ..ir.exprs import MLCall
from ..ir.nodes import PlanNode, node_exprs, walk_plan
from ..ir.exprs import subexpr_at
from ..stats.vector import StatsVector

DEFAULT_WEIGHTS = {
    "scan": 1.0,
    "filter": 1.0,
    "project": 1.0,
    "join": 2.0,
    "aggregate": 1.5,
    "limit": 1.0,
    "sample": 1.0,
}


@dataclass(frozen=True)
class CostModel:
    name: str = "default"
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def score(self, plan: PlanNode, stats: StatsVector) -> float:
        total = 0.0
        for path, node in walk_plan(plan):
            if path not in stats.nodes or "est_cardinality" not in stats.nodes[path]:
                raise MissingStats(f"no cardinality for node at {path}")
            card = stats.card(path)
            total += card * self.weights.get(node.kind, 1.0)
            exprs = node_exprs(node)
            for (slot, call_path), entries in stats.ml_for_node(path):
                if "flops" not in entries:
                    continue
                factor = 1.0
                if slot < len(exprs):
                    try:
                        call = subexpr_at(exprs[slot], call_path)
                    except IndexError:
                        call = None
                    if (
                        isinstance(call, MLCall)
                        and call.attrs.kernel_mode == "sparse"
                        and "nnz_ratio" in entries
                    ):
                        factor = entries["nnz_ratio"].value
                total += card * entries["flops"].value * factor
        return total


def score_plan(plan: PlanNode, stats: StatsVector, cost_model: CostModel | None = None) -> float:
    return (cost_model or CostModel()).score(plan, stats)
