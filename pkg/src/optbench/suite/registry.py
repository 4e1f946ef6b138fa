"""Suite catalog: per-query metadata, expected ML functions, and the
action-applicability matrix fixture."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import UnknownQuery
from ..ir.serde import plan_to_doc
from .gen import DEFAULT_SEED, generate_catalog
from .queries import QUERY_IDS, build_query

# Which ML functions each query's plan invokes.
EXPECTED_ML_FUNCTIONS: dict[str, frozenset] = {
    "Q_Expedia": frozenset({"decision_tree"}),
    "Q_Flights": frozenset({"decision_forest"}),
    "Q_Credit": frozenset({"decision_forest"}),
    "Q_UC01": frozenset({"min_max_scaler", "kmeans"}),
    "Q_UC03": frozenset({"one_hot_encoder", "matrix_multiply", "matrix_addition", "relu"}),
    "Q_UC04": frozenset({"naive_bayes"}),
    "Q_UC08": frozenset({"one_hot_encoder", "matrix_multiply", "matrix_addition", "relu", "softmax"}),
    "Q_UC10": frozenset({"matrix_multiply", "matrix_addition", "relu", "sigmoid"}),
    "Q_IDNet1": frozenset({"conv2d", "fused_dnn", "softmax", "argmax"}),
    "Q_IDNet2": frozenset({"llm"}),
}

# Covered by kernel unit tests instead of suite plans; relu appears only
# inside affine chains, never standalone.
KERNEL_ONLY_FUNCTIONS = frozenset({"distance", "cosine_sim"})

# Which built-in actions match each query's unoptimized plan, with the
# desk-scale parameter overrides the equivalence matrix applies.
APPLICABILITY: dict[str, tuple[tuple[str, dict], ...]] = {
    "Q_Expedia": (("TreeModelPruning", {}),),
    "Q_Flights": (
        ("DecisionForestUDF2Relation", {"row_key": "route_id"}),
        ("TreeModelPruning", {}),
    ),
    "Q_Credit": (
        ("DecisionForestUDF2Relation", {}),
        ("TreeModelPruning", {}),
    ),
    "Q_UC01": (),
    "Q_UC03": (
        ("MatMulDense2Sparse", {"min_rows": 1000}),
        ("Fuse2TorchNN", {}),
        ("MLFactorization", {}),
    ),
    "Q_UC04": (),
    "Q_UC08": (
        ("Fuse2TorchNN", {}),
        ("MultiLayerUDF2TorchNN", {}),
    ),
    "Q_UC10": (
        ("MatMulDense2Sparse", {"min_rows": 1000}),
        ("MatMul2Relation", {}),
        ("MLDecompositionPushdown", {}),
        ("Fuse2TorchNN", {}),
    ),
    "Q_IDNet1": (
        ("ConvNN2MatMul", {}),
        ("MLDecompositionPushdown", {}),
    ),
    "Q_IDNet2": (("MLDecompositionPushdown", {}),),
}

# Row-identity columns used when comparing results as multisets.
COMPARE_KEYS: dict[str, tuple[str, ...]] = {
    "Q_Expedia": ("srch_id", "prop_id"),
    "Q_Flights": ("route_id",),
    "Q_Credit": ("Time",),
    "Q_UC01": ("customer_id",),
    "Q_UC03": ("store", "department", "num_of_week"),
    "Q_UC04": ("review_id",),
    "Q_UC08": ("o_order_id", "department"),
    "Q_UC10": ("transaction_id", "fa_id"),
    "Q_IDNet1": ("license_number", "audit_id"),
    "Q_IDNet2": ("license_number",),
}

# The query the Fig.3-style directional check and the rule-authoring story use.
SCENARIO_QUERY = "Q_UC10"


@dataclass(frozen=True)
class SuiteEntry:
    query_id: str
    expected_ml_functions: frozenset
    applicable_actions: tuple[tuple[str, dict], ...]
    compare_keys: tuple[str, ...]
    description: str = ""


_DESCRIPTIONS = {
    "Q_Expedia": "hotel search ranking: 3-way join, 6 selective filters, tree scorer",
    "Q_Flights": "route attribute prediction: 4-way join, forest vote",
    "Q_Credit": "card fraud: filter plus additive forest over V1..V28 and Amount",
    "Q_UC01": "customer clustering: aggregation chain, min-max scaling, centroid assignment",
    "Q_UC03": "sales forecasting: store x department grid, encoders, 2-layer net",
    "Q_UC04": "review spam: tokenized text, naive-bayes scoring",
    "Q_UC08": "order classification: 3-way join, aggregation, 3-layer net with softmax",
    "Q_UC10": "fraud scoring: expanding join, sparse features, sigmoid net",
    "Q_IDNet1": "document audit: join with CNN verdict as filter",
    "Q_IDNet2": "LLM voting: sampled inputs, double cross join, majority vote",
}


def suite_entries() -> dict[str, SuiteEntry]:
    return {
        qid: SuiteEntry(
            query_id=qid,
            expected_ml_functions=EXPECTED_ML_FUNCTIONS[qid],
            applicable_actions=APPLICABILITY[qid],
            compare_keys=COMPARE_KEYS[qid],
            description=_DESCRIPTIONS[qid],
        )
        for qid in QUERY_IDS
    }


def suite_entry(query_id: str) -> SuiteEntry:
    entries = suite_entries()
    if query_id not in entries:
        raise UnknownQuery(query_id)
    return entries[query_id]


def dataset_spec(query_id: str, seed: int = DEFAULT_SEED, scale: float = 1.0) -> dict:
    cat = generate_catalog(query_id, seed, scale)
    return {
        "query_id": query_id,
        "seed": seed,
        "scale": scale,
        "tables": {
            name: {"rows": t.n_rows, "columns": [{"name": n, "dtype": str(dt)} for n, dt in t.schema.columns]}
            for name, t in sorted(cat.tables.items())
        },
        "models": cat.models.ids(),
    }


def export_suite(directory: str | Path, seed: int = DEFAULT_SEED) -> list[Path]:
    """Write checked-in plan and spec documents for every query."""
    directory = Path(directory)
    plans = directory / "plans"
    specs = directory / "specs"
    plans.mkdir(parents=True, exist_ok=True)
    specs.mkdir(parents=True, exist_ok=True)
    written = []
    for qid in QUERY_IDS:
        plan_path = plans / f"{qid}.plan.json"
        plan_path.write_text(json.dumps(plan_to_doc(build_query(qid, seed)), indent=2, sort_keys=True))
        entry = suite_entry(qid)
        spec_doc = {
            "format": "optbench-suite-entry/1",
            "query_id": qid,
            "description": entry.description,
            "expected_ml_functions": sorted(entry.expected_ml_functions),
            "applicable_actions": [{"action": a, "params": p} for a, p in entry.applicable_actions],
            "compare_keys": list(entry.compare_keys),
            "dataset": dataset_spec(qid, seed, 0.05),
        }
        spec_path = specs / f"{qid}.spec.json"
        spec_path.write_text(json.dumps(spec_doc, indent=2, sort_keys=True))
        written.extend([plan_path, spec_path])
    return written
