/** Typed client over the workbench HTTP API; every computation stays server-side. */

import type {
  ActionInfo,
  ApiErrorBody,
  BenchJobStatus,
  DiffResponse,
  OptimizerInfo,
  PlanResponse,
  QuerySummary,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message || `request failed (${status})`);
    this.code = body.code || "Error";
    this.status = status;
    this.detail = body.detail;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function parseError(res: Response): Promise<ApiError> {
  let body: ApiErrorBody;
  try {
    body = (await res.json()) as ApiErrorBody;
  } catch {
    body = { code: `HTTP${res.status}`, message: res.statusText || "request failed" };
  }
  if (!body || typeof body.message !== "string") {
    body = { code: `HTTP${res.status}`, message: JSON.stringify(body) };
  }
  return new ApiError(res.status, body);
}

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchImpl(this.base + path);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  queries(): Promise<QuerySummary[]> {
    return this.get("/queries");
  }

  plan(query: string, optimizer?: string | null): Promise<PlanResponse> {
    const suffix = optimizer ? `?optimizer=${encodeURIComponent(optimizer)}` : "";
    return this.get(`/queries/${encodeURIComponent(query)}/plan${suffix}`);
  }

  stats(query: string): Promise<{ query: string; stats: PlanResponse["stats"] }> {
    return this.get(`/stats/${encodeURIComponent(query)}`);
  }

  actions(): Promise<ActionInfo[]> {
    return this.get("/actions");
  }

  optimizers(): Promise<OptimizerInfo[]> {
    return this.get("/optimizers");
  }

  uploadOptimizer(doc: unknown): Promise<{ name: string; kind: string }> {
    return this.post("/optimizers", doc);
  }

  uploadAction(doc: unknown): Promise<ActionInfo> {
    return this.post("/actions", doc);
  }

  diff(query: string, left: string, right: string): Promise<DiffResponse> {
    const params = new URLSearchParams({ query, left, right });
    return this.get(`/plans/diff?${params.toString()}`);
  }

  submitBench(request: {
    queries?: string[];
    optimizers?: string[];
    repetitions?: number;
  }): Promise<{ job_id: string; status: string }> {
    return this.post("/bench", request);
  }

  benchStatus(jobId: string): Promise<BenchJobStatus> {
    return this.get(`/bench/${encodeURIComponent(jobId)}`);
  }
}
