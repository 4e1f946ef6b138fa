"""Benchmark harness, plan diffs, and report schema."""

from .diff import PlanDiff, diff_plans
from .harness import REPORT_FORMAT, BenchConfig, BenchmarkReport, result_digest, run_benchmark
from .schema import REPORT_SCHEMA

__all__ = [
    "BenchConfig",
    "BenchmarkReport",
    "PlanDiff",
    "REPORT_FORMAT",
    "REPORT_SCHEMA",
    "diff_plans",
    "result_digest",
    "run_benchmark",
]
