import json

import jsonschema
import pytest

from optbench.actions import ActionContext, MatMulDense2Sparse, apply_plan_rewrite
from optbench.actions.pushdown import MLDecompositionPushdown
from optbench.bench import (
    BenchConfig,
    REPORT_SCHEMA,
    diff_plans,
    result_digest,
    run_benchmark,
)
from optbench.engine import execute
from optbench.ir import canonical_hash, walk_plan
from optbench.stats import StatsConfig, collect_stats
from optbench.suite import build_query, generate_catalog

BASELINES = ["no-op", "heuristic-filter-pushdown"]


@pytest.fixture(scope="module")
def small_report():
    return run_benchmark(
        ["Q_Credit"], BASELINES, BenchConfig(repetitions=3, scale=0.2)
    )


class TestHarness:
    def test_run_counts(self, small_report):
        assert len(small_report.runs) == 2
        run = small_report.run_for("Q_Credit", "no-op")
        assert run["status"] == "ok"
        assert len(run["latencies_ms"]) == 3  # R timed runs; warm-up discarded

    def test_results_match_baseline(self, small_report):
        for r in small_report.runs:
            assert r["matches_baseline"] is True

    def test_equivalence_matrix_pairwise(self, small_report):
        assert small_report.equivalence["Q_Credit"] == {
            "no-op|heuristic-filter-pushdown": True,
        }

    def test_noop_plan_hash_equals_input(self, small_report):
        run = small_report.run_for("Q_Credit", "no-op")
        assert run["plan_hash"] == f"{canonical_hash(build_query('Q_Credit')):016x}"

    def test_schema_validates(self, small_report):
        jsonschema.validate(small_report.to_doc(), REPORT_SCHEMA)

    def test_failed_cell_recorded_not_raised(self):
        from optbench.optimizers import OptimizerProfile, OptimizerRegistry

        reg = OptimizerRegistry()
        reg.register(OptimizerProfile(name="no-op", kind="noop-baseline"))

        def explode(plan, ctx):
            raise RuntimeError("boom")

        reg.register(OptimizerProfile(name="user/broken", kind="external", entry_point=explode))
        report = run_benchmark(["Q_Credit"], ["no-op", "user/broken"],
                               BenchConfig(repetitions=2, scale=0.1),
                               optimizer_registry=reg)
        cell = report.run_for("Q_Credit", "user/broken")
        assert cell["status"] == "failed" and "boom" in cell["error"]
        assert report.run_for("Q_Credit", "no-op")["status"] == "ok"
        jsonschema.validate(report.to_doc(), REPORT_SCHEMA)

    def test_save_json_and_csv(self, small_report, tmp_path):
        out = tmp_path / "report.json"
        small_report.save(out)
        doc = json.loads(out.read_text())
        assert doc["format"] == "optbench-report/1"
        assert (tmp_path / "report.csv").exists()


class TestDigest:
    def test_digest_stable_across_runs(self):
        cat = generate_catalog("Q_Credit", scale=0.1)
        plan = build_query("Q_Credit")
        a = result_digest(execute(plan, cat))
        b = result_digest(execute(plan, cat))
        assert a == b

    def test_digest_tolerant_to_tiny_jitter(self):
        cat = generate_catalog("Q_Credit", scale=0.1)
        plan = build_query("Q_Credit")
        rs = execute(plan, cat)
        jittered = execute(plan, cat)
        jittered.columns["Class"] = jittered.columns["Class"] + 1e-13
        assert result_digest(rs) == result_digest(jittered)

    def test_digest_detects_real_change(self):
        cat = generate_catalog("Q_Credit", scale=0.1)
        plan = build_query("Q_Credit")
        rs = execute(plan, cat)
        changed = execute(plan, cat)
        changed.columns["Class"] = changed.columns["Class"] + 0.5
        assert result_digest(rs) != result_digest(changed)


class TestDiff:
    def test_identity_diff_empty(self):
        p = build_query("Q_UC10")
        assert diff_plans(p, p).empty

    def test_dense_to_sparse_single_attr_change(self):
        cat = generate_catalog("Q_UC10", scale=0.05)
        plan = build_query("Q_UC10")
        sv = collect_stats(plan, cat, StatsConfig(sample_size=256, seed=1))
        ctx = ActionContext(stats=sv, catalog=cat)
        _, flipped = apply_plan_rewrite(MatMulDense2Sparse(params={"min_rows": 10}), plan, ctx)
        diff = diff_plans(plan, flipped)
        assert len(diff.entries) == 1
        assert diff.entries[0]["change"] == "attr-changed"
        assert diff.entries[0]["path"] == "root"

    def test_pushdown_relocates_ml_below_join(self):
        cat = generate_catalog("Q_UC10", scale=0.05)
        plan = build_query("Q_UC10")
        sv = collect_stats(plan, cat, StatsConfig(enable_sampling=False))
        ctx = ActionContext(stats=sv, catalog=cat)
        _, pushed = apply_plan_rewrite(MLDecompositionPushdown(), plan, ctx)
        diff = diff_plans(plan, pushed)
        assert not diff.empty
        join_path = next(".".join(map(str, p)) for p, n in walk_plan(plan) if n.kind == "join")
        # the scorer moved: root expressions changed and a projection appeared below the join
        assert any(e["path"] == "root" and e["change"] == "expr-changed" for e in diff.entries)
        deeper = [e for e in diff.entries if e["path"].startswith(join_path)]
        assert any(e["after"].get("ml_calls", 0) > 0 or e["after"]["kind"] == "project"
                   for e in deeper)
