"""Benchmark query suite: seeded generators and checked-in plan builders."""

from .gen import DEFAULT_SCALE, DEFAULT_SEED, generate_catalog
from .queries import QUERY_IDS, build_query, idnet2_plan, table_schemas
from .registry import (
    APPLICABILITY,
    COMPARE_KEYS,
    EXPECTED_ML_FUNCTIONS,
    KERNEL_ONLY_FUNCTIONS,
    SCENARIO_QUERY,
    SuiteEntry,
    dataset_spec,
    export_suite,
    suite_entries,
    suite_entry,
)

__all__ = [
    "APPLICABILITY",
    "COMPARE_KEYS",
    "DEFAULT_SCALE",
    "DEFAULT_SEED",
    "EXPECTED_ML_FUNCTIONS",
    "KERNEL_ONLY_FUNCTIONS",
    "QUERY_IDS",
    "SCENARIO_QUERY",
    "SuiteEntry",
    "build_query",
    "dataset_spec",
    "export_suite",
    "generate_catalog",
    "idnet2_plan",
    "suite_entries",
    "suite_entry",
    "table_schemas",
]
