"""Command-line interface.

    optbench suite list
    optbench suite generate --seed N --scale S --out DIR
    optbench suite export --out suite/
    optbench optimize --query Q_UC10 --optimizer rule-sparse-pushdown
    optbench bench run --queries ... --optimizers ... --out report.json
    optbench kernel-bench
    optbench serve --port 8080
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .suite.gen import DEFAULT_SEED


@click.group()
def main():
    """Workbench for building and benchmarking SQL+ML query optimizers."""


@main.group()
def suite():
    """Query suite inspection and data generation."""


@suite.command("list")
def suite_list():
    from .suite.registry import suite_entries

    for qid, entry in suite_entries().items():
        actions = ", ".join(a for a, _ in entry.applicable_actions) or "-"
        click.echo(f"{qid:11s} {entry.description}")
        click.echo(f"{'':11s}   ml: {', '.join(sorted(entry.expected_ml_functions))}")
        click.echo(f"{'':11s}   actions: {actions}")


@suite.command("generate")
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=int)
@click.option("--scale", default=1.0, show_default=True, type=float)
@click.option("--query", "queries", multiple=True, help="restrict to specific queries")
@click.option("--out", required=True, type=click.Path(file_okay=False))
def suite_generate(seed, scale, queries, out):
    """Materialize catalogs as CSV tables + schema sidecars + model files."""
    from .suite.gen import generate_catalog
    from .suite.queries import QUERY_IDS

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for qid in queries or QUERY_IDS:
        qdir = out_dir / qid
        qdir.mkdir(exist_ok=True)
        catalog = generate_catalog(qid, seed, scale)
        for name in sorted(catalog.tables):
            catalog.save_csv(name, qdir / f"{name}.csv")
        catalog.models.save(qdir / "models.json")
        click.echo(f"{qid}: {len(catalog.tables)} tables -> {qdir}")


@suite.command("export")
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=int)
@click.option("--out", default="suite", show_default=True, type=click.Path(file_okay=False))
def suite_export(seed, out):
    """Write the checked-in plan and spec documents."""
    from .suite.registry import export_suite

    for path in export_suite(out, seed):
        click.echo(str(path))


@main.command()
@click.option("--query", required=True)
@click.option("--optimizer", default=None, help="registered profile name")
@click.option("--optimizer-file", default=None, type=click.Path(exists=True, dir_okay=False),
              help="optbench-optimizer/1 document to apply without registering a service")
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=int)
@click.option("--scale", default=1.0, show_default=True, type=float)
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="write optimized plan JSON")
@click.option("--trace-out", default=None, type=click.Path(dir_okay=False), help="write decision trace JSON")
def optimize(query, optimizer, optimizer_file, seed, scale, out, trace_out):
    """Optimize one suite query and report the decision trace."""
    from .actions.registry import ActionRegistry
    from .ir.serde import plan_to_doc
    from .optimizers.registry import OptimizeContext, builtin_registry, parse_optimizer_doc
    from .stats.collect import StatsCache, StatsConfig
    from .suite.gen import generate_catalog
    from .suite.queries import build_query

    actions = ActionRegistry()
    registry = builtin_registry(actions)
    if optimizer_file:
        profile = parse_optimizer_doc(json.loads(Path(optimizer_file).read_text()), actions)
    elif optimizer:
        profile = registry.get(optimizer)
    else:
        raise click.UsageError("pass --optimizer or --optimizer-file")

    plan = build_query(query, seed)
    catalog = generate_catalog(query, seed, scale)
    ctx = OptimizeContext(catalog=catalog, actions=actions,
                          stats_config=StatsConfig(seed=seed), cache=StatsCache())
    optimized, trace = profile.optimize(plan, ctx)
    click.echo(f"applied: {[a.action for a in trace.applied] or 'nothing'}")
    click.echo(f"final cost: {trace.final_cost}")
    click.echo(f"plan hash: {trace.output_hash:016x}" if trace.output_hash else "plan unchanged")
    if out:
        Path(out).write_text(json.dumps(plan_to_doc(optimized), indent=2, sort_keys=True))
        click.echo(f"plan -> {out}")
    if trace_out:
        Path(trace_out).write_text(json.dumps(trace.to_doc(), indent=2, sort_keys=True))
        click.echo(f"trace -> {trace_out}")


@main.group()
def bench():
    """Benchmarking."""


@bench.command("run")
@click.option("--queries", default="", help="comma-separated query ids (default: all)")
@click.option("--optimizers", default="", help="comma-separated profile names (default: built-ins)")
@click.option("--repetitions", "-r", default=5, show_default=True, type=int)
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=int)
@click.option("--scale", default=1.0, show_default=True, type=float)
@click.option("--sample-size", default=1024, show_default=True, type=int,
              help="rows per statistics sampling probe")
@click.option("--batch-size", default=1024, show_default=True, type=int,
              help="executor scan/filter/project chunk size")
@click.option("--out", default="report.json", show_default=True, type=click.Path(dir_okay=False))
def bench_run(queries, optimizers, repetitions, seed, scale, sample_size, batch_size, out):
    """Run the (query x optimizer) matrix and write report JSON + CSV."""
    from .actions.registry import ActionRegistry
    from .bench.harness import BenchConfig, run_benchmark
    from .optimizers.registry import builtin_registry
    from .suite.queries import QUERY_IDS

    actions = ActionRegistry()
    registry = builtin_registry(actions)
    qids = [q.strip() for q in queries.split(",") if q.strip()] or list(QUERY_IDS)
    names = [o.strip() for o in optimizers.split(",") if o.strip()] or registry.names()

    def progress(qid, name):
        click.echo(f"  {qid} x {name}", err=True)

    t0 = time.time()
    config = BenchConfig(repetitions=repetitions, seed=seed, scale=scale,
                         sample_size=sample_size, batch_size=batch_size)
    report = run_benchmark(qids, names, config,
                           optimizer_registry=registry, action_registry=actions, progress=progress)
    report.save(out)
    click.echo(f"{len(report.runs)} cells in {time.time() - t0:.1f}s -> {out} (+ .csv)")
    failed = [r for r in report.runs if r["status"] != "ok"]
    mismatched = [r for r in report.runs if r["status"] == "ok" and not r["matches_baseline"]]
    if failed:
        click.echo(f"failed cells: {[(r['query'], r['optimizer']) for r in failed]}")
    if mismatched:
        click.echo(f"baseline mismatches: {[(r['query'], r['optimizer']) for r in mismatched]}")
        sys.exit(1)


@main.command("kernel-bench")
@click.option("--rows", default=20000, show_default=True, type=int)
@click.option("--repeats", default=3, show_default=True, type=int)
def kernel_bench(rows, repeats):
    """Compare the compiled kernel core against the pure-numpy fallback."""
    import numpy as np

    from .kernels import numpy_impl

    try:
        from .kernels import _core
    except ImportError:
        _core = None

    rng = np.random.default_rng(0)
    x_sparse = rng.random((rows, 256)) * (rng.random((rows, 256)) < 0.1)
    w = rng.standard_normal((256, 32))
    images = rng.random((max(rows // 20, 64), 16, 16))
    filters = rng.standard_normal((4, 3, 3))
    depth, nodes = 6, 2 ** 7 - 1
    feat = rng.integers(0, 256, nodes)
    feat[nodes // 2:] = -1  # leaves
    thr = rng.random(nodes)
    left = np.minimum(np.arange(nodes) * 2 + 1, nodes - 1)
    right = np.minimum(np.arange(nodes) * 2 + 2, nodes - 1)
    val = rng.standard_normal(nodes)

    cases = {
        "csr_matmul": lambda impl: impl.csr_matmul(x_sparse, w),
        "tree_predict": lambda impl: impl.tree_predict(
            x_sparse, feat.astype(np.int64), thr, left.astype(np.int64), right.astype(np.int64), val),
        "conv2d": lambda impl: impl.conv2d(images, filters),
    }

    def run(impl, fn):
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn(impl)
            best = min(best, time.perf_counter() - t0)
        return best * 1000

    click.echo(f"{'kernel':14s} {'python (ms)':>12s} {'compiled (ms)':>14s} {'speedup':>8s}")
    for name, fn in cases.items():
        py = run(numpy_impl, fn)
        if _core is not None:
            cy = run(_core, fn)
            click.echo(f"{name:14s} {py:12.2f} {cy:14.2f} {py / cy:7.1f}x")
        else:
            click.echo(f"{name:14s} {py:12.2f} {'not built':>14s}")


@main.command()
@click.option("--port", default=None, type=int, help="default: $OPTBENCH_PORT or 8080")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=int)
@click.option("--scale", default=1.0, show_default=True, type=float)
@click.option("--frontend", default=None, type=click.Path(file_okay=False),
              help="directory of built UI assets to serve at /")
def serve(port, host, seed, scale, frontend):
    """Start the workbench HTTP service."""
    import os

    import uvicorn

    from .service.app import create_app
    from .service.session import ApiSession

    if port is None:
        port = int(os.environ.get("OPTBENCH_PORT", "8080"))
    if frontend is None:
        default_frontend = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if default_frontend.is_dir():
            frontend = str(default_frontend)
    app = create_app(ApiSession(seed=seed, scale=scale), frontend_dir=frontend)
    uvicorn.run(app, host=host, port=port)


@main.group()
def actions():
    """Rewrite action registry."""


@actions.command("list")
def actions_list():
    from .actions.registry import ActionRegistry

    for entry in ActionRegistry().describe():
        params = ", ".join(f"{k}={v}" for k, v in entry["params"].items()) or "-"
        click.echo(f"{entry['name']:28s} params: {params}")


if __name__ == "__main__":
    main()
