import type { BenchReport, DiffEntry, PlanNodeDoc, StatsDoc } from "../src/types.js";

/** A UC10-shaped plan document with path ids, as served by /queries/{id}/plan. */
export const planFixture: PlanNodeDoc = {
  kind: "project",
  path: "root",
  exprs: [
    { expr: { kind: "col", name: "transaction_id" }, name: "transaction_id" },
    { expr: { kind: "col", name: "fa_id" }, name: "fa_id" },
    {
      expr: {
        kind: "ml",
        fn: "sigmoid",
        args: [
          {
            kind: "ml",
            fn: "matrix_multiply",
            args: [{ kind: "col", name: "tx_features" }, { kind: "lit", dtype: "matrix(2,1)", value: [[1], [1]] }],
            attrs: { kernel_mode: "dense" },
          },
        ],
        attrs: {},
      },
      name: "prediction",
    },
  ],
  child: {
    kind: "join",
    path: "0",
    join_type: "inner",
    condition: { kind: "compare", op: "eq", lhs: { kind: "col", name: "sender_id" }, rhs: { kind: "col", name: "fa_customer_sk" } },
    left: { kind: "scan", path: "0.0", table: "uc10_transactions", schema: [] } as unknown as PlanNodeDoc,
    right: { kind: "scan", path: "0.1", table: "uc10_account_history", schema: [] } as unknown as PlanNodeDoc,
  },
};

/** The pushed-down variant: score helper computed above the left scan. */
export const pushedPlanFixture: PlanNodeDoc = {
  kind: "project",
  path: "root",
  exprs: [
    { expr: { kind: "col", name: "transaction_id" }, name: "transaction_id" },
    { expr: { kind: "col", name: "fa_id" }, name: "fa_id" },
    { expr: { kind: "col", name: "__push0" }, name: "prediction" },
  ],
  child: {
    kind: "join",
    path: "0",
    join_type: "inner",
    condition: { kind: "compare", op: "eq", lhs: { kind: "col", name: "sender_id" }, rhs: { kind: "col", name: "fa_customer_sk" } },
    left: {
      kind: "project",
      path: "0.0",
      exprs: [
        { expr: { kind: "col", name: "transaction_id" }, name: "transaction_id" },
        {
          expr: { kind: "ml", fn: "sigmoid", args: [{ kind: "col", name: "tx_features" }], attrs: {} },
          name: "__push0",
        },
      ],
      child: { kind: "scan", path: "0.0.0", table: "uc10_transactions", schema: [] } as unknown as PlanNodeDoc,
    },
    right: { kind: "scan", path: "0.1", table: "uc10_account_history", schema: [] } as unknown as PlanNodeDoc,
  },
};

export const diffFixture: DiffEntry[] = [
  { path: "root", change: "expr-changed", before: { kind: "project" }, after: { kind: "project" } },
  { path: "0.0", change: "replaced", before: { kind: "scan" }, after: { kind: "project", ml_calls: 1 } },
];

export const statsFixture: StatsDoc = {
  sample_size: 1024,
  nodes: {
    root: { est_cardinality: { value: 100000, source: "estimated" } },
    "0": { est_cardinality: { value: 100000, source: "estimated" }, join_ratio: { value: 0.05, source: "estimated" } },
    "0.0": { est_cardinality: { value: 20000, source: "estimated" } },
    "0.1": { est_cardinality: { value: 20000, source: "estimated" } },
  },
  ml: [
    {
      path: "root",
      slot: 2,
      call_path: "0",
      stats: {
        flops: { value: 1024, source: "metadata" },
        nnz_ratio: { value: 0.1, source: "sampled" },
        sparsity: { value: 0.9, source: "sampled" },
      },
    },
  ],
};

/** Benchmark report with one failed cell, as /bench/{job} returns it. */
export const reportFixture: BenchReport = {
  format: "optbench-report/1",
  environment: { seed: 7, scale: 1.0, repetitions: 5, timestamp: "2026-01-01T00:00:00" },
  runs: [
    {
      query: "Q_UC10",
      optimizer: "no-op",
      status: "ok",
      latency_ms: 640.0,
      optimize_time_ms: 0.2,
      result_digest: "aa",
      matches_baseline: true,
      ml_call_invocations: 600000,
      plan_hash: "00112233aabbccdd",
      trace: { events: [], applied_actions: [], final_cost: null, input_hash: "00", output_hash: "00", elapsed_ms: 0.1 },
    },
    {
      query: "Q_UC10",
      optimizer: "rule-sparse-pushdown",
      status: "ok",
      latency_ms: 430.0,
      optimize_time_ms: 3000.0,
      result_digest: "aa",
      matches_baseline: true,
      ml_call_invocations: 120000,
      plan_hash: "99887766aabbccdd",
      trace: {
        events: [
          { kind: "rule-fired", rule: "push-inference-and-sparsify", predicate_snapshot: { "sparsity>0.7@any": 0.9 } },
          { kind: "action-applied", action: "MLDecompositionPushdown", node_path: "root", description: "rewrote project node", before_hash: "00", after_hash: "11" },
        ],
        applied_actions: [{ action: "MLDecompositionPushdown", params: {} }],
        final_cost: 123456.0,
        input_hash: "00",
        output_hash: "11",
        elapsed_ms: 3000,
      },
    },
    {
      query: "Q_UC10",
      optimizer: "user/broken",
      status: "failed",
      error: "RuntimeError: boom",
    },
  ],
  equivalence: {
    Q_UC10: { "no-op|rule-sparse-pushdown": true },
  },
};

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
