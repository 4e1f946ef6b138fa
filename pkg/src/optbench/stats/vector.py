"""Per-plan statistics container."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..ir.nodes import NodePath

# Statistic names rule predicates may reference.
NODE_STAT_NAMES = ("est_cardinality", "est_selectivity", "join_ratio")
ML_STAT_NAMES = (
    "nnz_ratio",
    "zero_rows",
    "zero_cols",
    "sparsity",
    "flops",
    "num_parameters",
    "forest_num_trees",
)
ALL_STAT_NAMES = NODE_STAT_NAMES + ML_STAT_NAMES

SOURCES = ("estimated", "sampled", "metadata")


@dataclass(frozen=True)
class StatEntry:
    value: float
    source: str

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown stat source {self.source!r}")


MLKey = tuple[NodePath, int, tuple]  # (node path, expression slot, call path inside the expression)


@dataclass
class StatsVector:
    """Named statistics attached to plan nodes and to MLCall sites."""

    nodes: dict[NodePath, dict[str, StatEntry]] = field(default_factory=dict)
    ml: dict[MLKey, dict[str, StatEntry]] = field(default_factory=dict)
    sample_size: int = 0

    def node(self, path: NodePath) -> dict[str, StatEntry]:
        return self.nodes.setdefault(path, {})

    def card(self, path: NodePath) -> float:
        return self.nodes[path]["est_cardinality"].value

    def set_node(self, path: NodePath, name: str, value: float, source: str) -> None:
        self.node(path)[name] = StatEntry(float(value), source)

    def ml_entry(self, key: MLKey) -> dict[str, StatEntry]:
        return self.ml.setdefault(key, {})

    def ml_at(self, path: NodePath, slot: int, call_path: tuple) -> dict[str, StatEntry]:
        return self.ml.get((path, slot, call_path), {})

    def ml_for_node(self, path: NodePath):
        for (p, slot, cpath), entries in self.ml.items():
            if p == path:
                yield (slot, cpath), entries

    def expr_input_rows(self, path: NodePath) -> float:
        """Rows an expression at this node processes (the first child's output)."""
        child = path + (0,)
        if child in self.nodes:
            return self.card(child)
        return self.card(path)

    def values_of(self, name: str, *, root_only: bool = False):
        """All values recorded under a statistic name; rule predicate support."""
        for path, entries in self.nodes.items():
            if root_only and path != ():
                continue
            if name in entries:
                yield entries[name].value
        for (path, _, _), entries in self.ml.items():
            if root_only and path != ():
                continue
            if name in entries:
                yield entries[name].value

    def to_doc(self) -> dict:
        def fmt(entries):
            return {k: {"value": v.value, "source": v.source} for k, v in sorted(entries.items())}

        return {
            "sample_size": self.sample_size,
            "nodes": {".".join(map(str, p)) or "root": fmt(e) for p, e in sorted(self.nodes.items())},
            "ml": [
                {
                    "path": ".".join(map(str, p)) or "root",
                    "slot": slot,
                    "call_path": ".".join(map(str, cp)),
                    "stats": fmt(entries),
                }
                for (p, slot, cp), entries in sorted(self.ml.items())
            ],
        }
