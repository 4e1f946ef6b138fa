"""Benchmark harness: the (query x optimizer) matrix on one backend.

Per query, every optimizer sees the same catalog instance and the same
stats seed. Cells record optimize time, median latency over R repetitions
(after one discarded warm-up), a tolerance-quantized result digest, and the
decision trace. Optimizer failures are recorded per cell and never abort
the matrix. Results are verified against the no-op baseline's result.
"""

from __future__ import annotations

import csv
import hashlib
import json
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..actions.registry import ActionRegistry
from ..engine.compare import compare_results
from ..engine.executor import ResultSet, execute
from ..ir.hashing import canonical_hash
from ..kernels import BACKEND_NAME
from ..optimizers.registry import OptimizeContext, OptimizerRegistry
from ..stats.collect import StatsCache, StatsConfig
from ..suite.gen import DEFAULT_SEED, generate_catalog
from ..suite.queries import build_query
from ..suite.registry import COMPARE_KEYS

REPORT_FORMAT = "optbench-report/1"
DIGEST_QUANTUM = 1e-6  # floats are quantized to this step before digesting


@dataclass(frozen=True)
class BenchConfig:
    repetitions: int = 5
    seed: int = DEFAULT_SEED
    scale: float = 1.0
    sample_size: int = 1024
    tolerance: float = 1e-6
    batch_size: int = 1024


def _quantize(v):
    if isinstance(v, (np.floating, float)):
        q = round(float(v) / DIGEST_QUANTUM)
        return q + 0  # drops negative zero
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        if v.dtype.kind == "f":
            return tuple((np.round(v / DIGEST_QUANTUM).astype(np.int64) + 0).ravel().tolist())
        return tuple(v.ravel().tolist())
    return v


def result_digest(rs: ResultSet) -> str:
    """Order-insensitive digest; tolerance-equal results digest equally."""
    names = sorted(rs.schema.names)
    rows = sorted(
        tuple(_quantize(rs.columns[n][i]) for n in names) for i in range(rs.n_rows)
    )
    h = hashlib.blake2b(digest_size=16)
    h.update(repr(names).encode())
    for row in rows:
        h.update(repr(row).encode())
    return h.hexdigest()


@dataclass
class BenchmarkReport:
    runs: list[dict] = field(default_factory=list)
    equivalence: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)

    def run_for(self, query: str, optimizer: str) -> dict:
        for r in self.runs:
            if r["query"] == query and r["optimizer"] == optimizer:
                return r
        raise KeyError((query, optimizer))

    def to_doc(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "environment": self.environment,
            "runs": self.runs,
            "equivalence": self.equivalence,
        }

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.write_text(json.dumps(self.to_doc(), indent=2, sort_keys=True))
        with open(path.with_suffix(".csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["query", "optimizer", "status", "latency_ms", "optimize_time_ms",
                 "ml_call_invocations", "result_digest", "matches_baseline"]
            )
            for r in self.runs:
                writer.writerow([
                    r["query"], r["optimizer"], r["status"],
                    r.get("latency_ms"), r.get("optimize_time_ms"),
                    r.get("ml_call_invocations"), r.get("result_digest"),
                    r.get("matches_baseline"),
                ])


def run_benchmark(
    queries,
    optimizers,
    config: BenchConfig = BenchConfig(),
    optimizer_registry: OptimizerRegistry | None = None,
    action_registry: ActionRegistry | None = None,
    progress=None,
) -> BenchmarkReport:
    actions = action_registry or ActionRegistry()
    if optimizer_registry is None:
        from ..optimizers.registry import builtin_registry

        optimizer_registry = builtin_registry(actions)

    report = BenchmarkReport(environment={
        "seed": config.seed,
        "scale": config.scale,
        "repetitions": config.repetitions,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "kernel_backend": BACKEND_NAME,
    })

    for qid in queries:
        catalog = generate_catalog(qid, config.seed, config.scale)
        plan = build_query(qid, config.seed)
        cache = StatsCache()
        octx = OptimizeContext(
            catalog=catalog,
            actions=actions,
            stats_config=StatsConfig(sample_size=config.sample_size, seed=config.seed),
            cache=cache,
        )
        keys = COMPARE_KEYS.get(qid, ())
        baseline_result = execute(plan, catalog, seed=config.seed, batch_size=config.batch_size)
        baseline_digest = result_digest(baseline_result)
        cell_results: dict[str, ResultSet] = {}

        for name in optimizers:
            if progress:
                progress(qid, name)
            try:
                profile = optimizer_registry.get(name)
                t0 = time.perf_counter()
                optimized, trace = profile.optimize(plan, octx)
                optimize_ms = (time.perf_counter() - t0) * 1000.0
                latencies = []
                result = None
                for rep in range(config.repetitions + 1):
                    result = execute(optimized, catalog, seed=config.seed, batch_size=config.batch_size)
                    if rep > 0:  # first run is the discarded warm-up
                        latencies.append(result.stats.wall_time_ms)
                digest = result_digest(result)
                verdict = digest == baseline_digest or bool(
                    compare_results(baseline_result, result, keys, config.tolerance)
                )
                cell_results[name] = result
                report.runs.append({
                    "query": qid,
                    "optimizer": name,
                    "status": "ok",
                    "latency_ms": statistics.median(latencies),
                    "latencies_ms": latencies,
                    "optimize_time_ms": optimize_ms,
                    "result_digest": digest,
                    "matches_baseline": verdict,
                    "ml_call_invocations": result.stats.ml_call_invocations,
                    "rows": result.n_rows,
                    "plan_hash": f"{canonical_hash(optimized):016x}",
                    "trace": trace.to_doc(),
                })
            except Exception as e:  # failures are data, not crashes
                report.runs.append({
                    "query": qid,
                    "optimizer": name,
                    "status": "failed",
                    "error": f"{type(e).__name__}: {e}",
                })

        matrix = {}
        ok_names = [n for n in optimizers if n in cell_results]
        for i, a in enumerate(ok_names):
            for b in ok_names[i + 1:]:
                ra, rb = cell_results[a], cell_results[b]
                same = result_digest(ra) == result_digest(rb) or bool(
                    compare_results(ra, rb, keys, config.tolerance)
                )
                matrix[f"{a}|{b}"] = same
        report.equivalence[qid] = matrix
    return report
