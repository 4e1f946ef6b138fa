"""One-pass statistics collection with subplan-hash caching."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..engine.table import Catalog
from ..errors import EmptySample, NonNumericFeature
from ..ir.derive import derive_schema, expr_dtype
from ..ir.exprs import MLCall, walk
from ..ir.hashing import canonical_hash
from ..ir.nodes import Filter, Join, PlanNode, node_exprs
from ..kernels.shapes import get_shape
from .estimator import estimate_cardinality, predicate_selectivity
from .sampling import evaluate_feature_matrix, feature_args_of, matrix_stats
from .vector import StatEntry, StatsVector


@dataclass(frozen=True)
class StatsConfig:
    sample_size: int = 1024
    seed: int = 0
    enable_sampling: bool = True

    def key(self) -> tuple:
        return (self.sample_size, self.seed, self.enable_sampling)


@dataclass
class _Subtree:
    nodes: dict = field(default_factory=dict)  # relative path -> entries
    ml: dict = field(default_factory=dict)


class StatsCache:
    """Subplan-hash keyed cache; invalidated when the catalog epoch moves."""

    def __init__(self):
        self._entries: dict[tuple, _Subtree] = {}
        self.hits = 0
        self.misses = 0
        self._epoch = None

    def _roll(self, epoch: int) -> None:
        if self._epoch != epoch:
            self._entries.clear()
            self._epoch = epoch

    def get(self, epoch: int, key: tuple) -> _Subtree | None:
        self._roll(epoch)
        found = self._entries.get(key)
        if found is not None:
            self.hits += 1
        return found

    def put(self, epoch: int, key: tuple, subtree: _Subtree) -> None:
        self._roll(epoch)
        self.misses += 1
        self._entries[key] = subtree


def collect_stats(
    plan: PlanNode,
    catalog: Catalog,
    config: StatsConfig = StatsConfig(),
    cache: StatsCache | None = None,
) -> StatsVector:
    """Attach cardinality/selectivity/join-ratio per node and ML stats per call.

    Shape stats (flops, parameter counts, tree counts) are always attached;
    sampled sparsity stats are attached when `config.enable_sampling`.
    Results for a subplan are cached by its canonical hash.
    """
    sv = StatsVector(sample_size=config.sample_size if config.enable_sampling else 0)
    _collect(plan, (), sv, catalog, config, cache)
    return sv


def _collect(node: PlanNode, path: tuple, sv: StatsVector, catalog: Catalog,
             config: StatsConfig, cache: StatsCache | None) -> None:
    key = (canonical_hash(node), config.key())
    if cache is not None:
        cached = cache.get(catalog.epoch, key)
        if cached is not None:
            _splice(sv, path, cached)
            return

    for i, child in enumerate(node.children):
        _collect(child, path + (i,), sv, catalog, config, cache)

    card = estimate_cardinality(node, catalog)
    sv.set_node(path, "est_cardinality", card, "estimated")
    if isinstance(node, Filter):
        sv.set_node(path, "est_selectivity", predicate_selectivity(node.predicate), "estimated")
    if isinstance(node, Join):
        product = sv.card(path + (0,)) * sv.card(path + (1,))
        sv.set_node(path, "join_ratio", card / product if product > 0 else 0.0, "estimated")

    _collect_ml(node, path, sv, catalog, config)

    if cache is not None:
        cache.put(catalog.epoch, key, _extract(sv, path))


def _collect_ml(node: PlanNode, path: tuple, sv: StatsVector, catalog: Catalog,
                config: StatsConfig) -> None:
    child_schema = derive_schema(node.children[0]) if node.children else derive_schema(node)
    sites = []
    for slot, expr in enumerate(node_exprs(node)):
        for call_path, sub in walk(expr):
            if isinstance(sub, MLCall):
                sites.append((slot, call_path, sub))
    if not sites:
        return
    for slot, call_path, sub in sites:
        entries = sv.ml_entry((path, slot, call_path))
        arg_dtypes = [expr_dtype(a, child_schema) for a in sub.args]
        info = get_shape(sub.fn, sub.attrs, catalog.models, arg_dtypes)
        entries["flops"] = StatEntry(info.flops, "metadata")
        entries["num_parameters"] = StatEntry(float(info.num_parameters), "metadata")
        if info.forest_num_trees is not None:
            entries["forest_num_trees"] = StatEntry(float(info.forest_num_trees), "metadata")

    if not (config.enable_sampling and node.children):
        return
    if not any(feature_args_of(sub) for _, _, sub in sites):
        return
    # one sampling probe per node; every call's features measured on its rows
    block = _sampled_block(node.children[0], catalog, config)
    if block is None:
        return
    executor, sample = block
    for slot, call_path, sub in sites:
        feature_args = feature_args_of(sub)
        if not feature_args:
            continue
        try:
            x = evaluate_feature_matrix(executor, sample, feature_args)
            measured = matrix_stats(x)
        except (EmptySample, NonNumericFeature):
            continue
        entries = sv.ml_entry((path, slot, call_path))
        for name in ("nnz_ratio", "zero_rows", "zero_cols"):
            entries[name] = StatEntry(measured[name], "sampled")
        entries["sparsity"] = StatEntry(1.0 - measured["nnz_ratio"], "sampled")


def _sampled_block(child: PlanNode, catalog: Catalog, config: StatsConfig):
    from ..engine.executor import Executor, _Block
    from ..ir.nodes import Sample

    executor = Executor(catalog)
    result = executor.run(Sample(child, config.sample_size, config.seed))
    if result.n_rows == 0:
        return None
    return executor, _Block(result.schema, result.columns, result.n_rows)


def _extract(sv: StatsVector, prefix: tuple) -> _Subtree:
    k = len(prefix)
    sub = _Subtree()
    for p, entries in sv.nodes.items():
        if p[:k] == prefix:
            sub.nodes[p[k:]] = dict(entries)
    for (p, slot, cpath), entries in sv.ml.items():
        if p[:k] == prefix:
            sub.ml[(p[k:], slot, cpath)] = dict(entries)
    return sub


def _splice(sv: StatsVector, prefix: tuple, sub: _Subtree) -> None:
    for rel, entries in sub.nodes.items():
        sv.nodes[prefix + rel] = dict(entries)
    for (rel, slot, cpath), entries in sub.ml.items():
        sv.ml[(prefix + rel, slot, cpath)] = dict(entries)
