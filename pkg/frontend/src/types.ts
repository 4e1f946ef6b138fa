/** Payload shapes of the optbench HTTP API (docs/api.md in the backend repo). */

export interface QuerySummary {
  id: string;
  description: string;
  expected_ml_functions: string[];
  compare_keys: string[];
}

export interface PlanNodeDoc {
  kind: string;
  path: string;
  table?: string;
  join_type?: string;
  n?: number;
  exprs?: { expr: unknown; name: string }[];
  aggregates?: { fn: string; expr: unknown; name: string }[];
  group_keys?: unknown[];
  predicate?: unknown;
  condition?: unknown;
  child?: PlanNodeDoc;
  left?: PlanNodeDoc;
  right?: PlanNodeDoc;
}

export interface StatEntry {
  value: number;
  source: "estimated" | "sampled" | "metadata";
}

export interface StatsDoc {
  sample_size: number;
  nodes: Record<string, Record<string, StatEntry>>;
  ml: { path: string; slot: number; call_path: string; stats: Record<string, StatEntry> }[];
}

export interface TraceDoc {
  events: ({ kind: string } & Record<string, unknown>)[];
  applied_actions: { action: string; params: Record<string, unknown> }[];
  final_cost: number | null;
  input_hash: string | null;
  output_hash: string | null;
  elapsed_ms: number;
}

export interface PlanResponse {
  query: string;
  optimizer: string | null;
  plan: { format: string; root: PlanNodeDoc };
  plan_hash: string;
  stats: StatsDoc;
  trace: TraceDoc | null;
}

export interface DiffEntry {
  path: string;
  change: "attr-changed" | "expr-changed" | "field-changed" | "replaced";
  before: Record<string, unknown>;
  after: Record<string, unknown>;
}

export interface DiffResponse {
  query: string;
  left: string;
  right: string;
  left_hash: string;
  right_hash: string;
  diff: { entries: DiffEntry[]; empty: boolean };
}

export interface ActionInfo {
  name: string;
  params: Record<string, unknown>;
  builtin: boolean;
}

export interface OptimizerInfo {
  name: string;
  kind: string;
  builtin: boolean;
  rules?: string[];
  actions?: string[];
  depth_budget?: number;
}

export interface BenchRun {
  query: string;
  optimizer: string;
  status: "ok" | "failed";
  latency_ms?: number;
  latencies_ms?: number[];
  optimize_time_ms?: number;
  result_digest?: string;
  matches_baseline?: boolean;
  ml_call_invocations?: number;
  rows?: number;
  plan_hash?: string;
  trace?: TraceDoc;
  error?: string;
}

export interface BenchReport {
  format: string;
  environment: { seed: number; scale: number; repetitions: number; timestamp: string };
  runs: BenchRun[];
  equivalence: Record<string, Record<string, boolean>>;
}

export interface BenchJobStatus {
  job_id: string;
  status: "queued" | "running" | "done" | "failed";
  request: Record<string, unknown>;
  report?: BenchReport;
  error?: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

/** Statistic names the rule editor may reference (mirrors the backend DSL). */
export const STAT_NAMES = [
  "est_cardinality",
  "est_selectivity",
  "join_ratio",
  "nnz_ratio",
  "zero_rows",
  "zero_cols",
  "sparsity",
  "flops",
  "num_parameters",
  "forest_num_trees",
] as const;

export const COMPARATORS = [">", ">=", "<", "<=", "==", "!="] as const;
export const SCOPES = ["any", "root"] as const;
