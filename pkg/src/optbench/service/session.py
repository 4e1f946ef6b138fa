"""Workbench session state shared by the HTTP facade."""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from ..actions.registry import ActionRegistry
from ..bench.harness import BenchConfig, run_benchmark
from ..engine.table import Catalog
from ..optimizers.registry import OptimizeContext, OptimizerRegistry, builtin_registry
from ..stats.collect import StatsCache, StatsConfig
from ..suite.gen import DEFAULT_SEED, generate_catalog
from ..suite.queries import build_query


@dataclass
class BenchJob:
    job_id: str
    status: str = "queued"  # queued | running | done | failed
    request: dict = field(default_factory=dict)
    report: Optional[dict] = None
    error: Optional[str] = None


class ApiSession:
    """Registries, catalog cache, and the single-worker bench job queue.

    Benchmark jobs run one at a time: timing fairness forbids co-scheduling
    timed executions.
    """

    def __init__(self, seed: int = DEFAULT_SEED, scale: float = 1.0, sample_size: int = 1024):
        self.seed = seed
        self.scale = scale
        self.sample_size = sample_size
        self.actions = ActionRegistry()
        self.optimizers = builtin_registry(self.actions)
        self._catalogs: dict[str, Catalog] = {}
        self._stats_caches: dict[str, StatsCache] = {}
        self._lock = threading.RLock()
        self._jobs: dict[str, BenchJob] = {}
        self._job_queue: list[str] = []
        self._worker: Optional[threading.Thread] = None

    # --- catalogs / optimization ---

    def catalog(self, query_id: str) -> Catalog:
        with self._lock:
            if query_id not in self._catalogs:
                self._catalogs[query_id] = generate_catalog(query_id, self.seed, self.scale)
            return self._catalogs[query_id]

    def optimize_context(self, query_id: str) -> OptimizeContext:
        with self._lock:
            cache = self._stats_caches.setdefault(query_id, StatsCache())
        return OptimizeContext(
            catalog=self.catalog(query_id),
            actions=self.actions,
            stats_config=StatsConfig(sample_size=self.sample_size, seed=self.seed),
            cache=cache,
        )

    def optimized_plan(self, query_id: str, optimizer: Optional[str]):
        plan = build_query(query_id, self.seed)
        if optimizer is None or optimizer == "none":
            return plan, None
        profile = self.optimizers.get(optimizer)
        optimized, trace = profile.optimize(plan, self.optimize_context(query_id))
        return optimized, trace

    # --- bench jobs ---

    def submit_bench(self, request: dict) -> BenchJob:
        job = BenchJob(job_id=uuid.uuid4().hex[:12], request=dict(request))
        with self._lock:
            self._jobs[job.job_id] = job
            self._job_queue.append(job.job_id)
            if self._worker is None or not self._worker.is_alive():
                self._worker = threading.Thread(target=self._drain_jobs, daemon=True)
                self._worker.start()
        return job

    def job(self, job_id: str) -> BenchJob:
        with self._lock:
            if job_id not in self._jobs:
                raise KeyError(job_id)
            return self._jobs[job_id]

    def _drain_jobs(self) -> None:
        while True:
            with self._lock:
                if not self._job_queue:
                    return
                job = self._jobs[self._job_queue.pop(0)]
                job.status = "running"
            try:
                req = job.request
                config = BenchConfig(
                    repetitions=int(req.get("repetitions", 5)),
                    seed=int(req.get("seed", self.seed)),
                    scale=float(req.get("scale", self.scale)),
                    sample_size=self.sample_size,
                )
                report = run_benchmark(
                    req["queries"],
                    req["optimizers"],
                    config,
                    optimizer_registry=self.optimizers,
                    action_registry=self.actions,
                )
                job.report = report.to_doc()
                job.status = "done"
            except Exception as e:
                job.error = f"{type(e).__name__}: {e}"
                job.status = "failed"
