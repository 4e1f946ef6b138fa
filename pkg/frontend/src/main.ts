/** Workbench shell: wires the eight panels to the service API.
 *
 * 1 query selector   2 side-by-side plan panes    3 statistics window
 * 4 rewrite actions  5 optimizer profiles         6 rule editor
 * 7 benchmark dashboard (1 s polling)             8 upload panel
 */

import { ApiError, Client } from "./api.js";
import { buildDashboardModel, renderDashboard } from "./dashboard.js";
import { renderErrorCard, renderPane } from "./planView.js";
import type { RuleDraft } from "./ruleEditor.js";
import { canSubmit, submitDraft, validateDraft } from "./ruleEditor.js";
import { Store } from "./state.js";
import { renderStatsTable } from "./statsView.js";
import { renderTrace } from "./traceView.js";
import type { ActionInfo, BenchReport, OptimizerInfo } from "./types.js";
import { COMPARATORS, SCOPES, STAT_NAMES } from "./types.js";

const client = new Client("");
const store = new Store();

let knownActions: ActionInfo[] = [];
let knownOptimizers: OptimizerInfo[] = [];
let lastReport: BenchReport | null = null;
let pollTimer: number | null = null;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function showError(target: HTMLElement, e: unknown): void {
  const err = e instanceof ApiError ? e : { code: "Error", message: String((e as Error).message ?? e) };
  target.innerHTML = renderErrorCard(err.code, err.message);
}

async function refreshQueries(): Promise<void> {
  const queries = await client.queries();
  const select = el<HTMLSelectElement>("query-select");
  select.innerHTML = queries
    .map((q) => `<option value="${q.id}">${q.id} — ${q.description}</option>`)
    .join("");
  if (!store.get().selectedQuery && queries.length) {
    store.selectQuery(queries[0].id);
  }
  select.value = store.get().selectedQuery ?? "";
}

async function refreshActions(): Promise<void> {
  knownActions = await client.actions();
  el("actions-list").innerHTML = knownActions
    .map((a) => {
      const params = Object.entries(a.params)
        .map(([k, v]) => `${k}=${JSON.stringify(v)}`)
        .join(", ");
      return `<li><code>${a.name}</code>${a.builtin ? "" : " (uploaded)"}${
        params ? `<span class="params">${params}</span>` : ""
      }</li>`;
    })
    .join("");
  const picker = el("rule-actions");
  picker.innerHTML = knownActions
    .map(
      (a) =>
        `<label><input type="checkbox" class="action-choice" value="${a.name}"> <code>${a.name}</code></label>`,
    )
    .join("");
  picker.querySelectorAll("input").forEach((cb) =>
    cb.addEventListener("change", syncDraftFromForm),
  );
}

async function refreshOptimizers(selectNew?: string): Promise<void> {
  knownOptimizers = await client.optimizers();
  el("optimizers-list").innerHTML = knownOptimizers
    .map((o) => `<li><code>${o.name}</code> <span class="kind">${o.kind}</span>${o.builtin ? "" : " (uploaded)"}</li>`)
    .join("");
  for (const side of ["left", "right"] as const) {
    const select = el<HTMLSelectElement>(`${side}-optimizer`);
    const current = side === "left" ? store.get().leftOptimizer : store.get().rightOptimizer;
    select.innerHTML = knownOptimizers.map((o) => `<option value="${o.name}">${o.name}</option>`).join("");
    select.value = selectNew && side === "right" ? selectNew : current;
  }
  const benchPick = el("bench-optimizers");
  benchPick.innerHTML = knownOptimizers
    .map(
      (o) =>
        `<label><input type="checkbox" class="bench-choice" value="${o.name}" ${o.builtin ? "checked" : ""}> ${o.name}</label>`,
    )
    .join("");
  syncPaneState();
}

function syncPaneState(): void {
  store.setPaneOptimizers(
    el<HTMLSelectElement>("left-optimizer").value,
    el<HTMLSelectElement>("right-optimizer").value,
  );
}

async function refreshPanes(): Promise<void> {
  const { selectedQuery, leftOptimizer, rightOptimizer } = store.get();
  if (!selectedQuery) return;
  const leftPane = el("left-pane");
  const rightPane = el("right-pane");
  try {
    const [left, right, diff] = await Promise.all([
      client.plan(selectedQuery, leftOptimizer),
      client.plan(selectedQuery, rightOptimizer),
      client.diff(selectedQuery, leftOptimizer, rightOptimizer),
    ]);
    leftPane.innerHTML = renderPane(left.plan.root, diff.diff.entries, left.stats);
    rightPane.innerHTML = renderPane(right.plan.root, diff.diff.entries, right.stats);
    el("left-trace").innerHTML = renderTrace(left.trace);
    el("right-trace").innerHTML = renderTrace(right.trace);
    el("stats-window").innerHTML = renderStatsTable(left.stats);
  } catch (e) {
    showError(leftPane, e);
    showError(rightPane, e);
  }
}

function draftFromForm(): RuleDraft {
  const actions = Array.from(document.querySelectorAll<HTMLInputElement>(".action-choice:checked")).map(
    (cb) => ({
      action: cb.value,
      params: cb.value === "MatMulDense2Sparse" ? { min_rows: 1000 } : {},
    }),
  );
  return {
    name: el<HTMLInputElement>("rule-name").value,
    priority: Number(el<HTMLInputElement>("rule-priority").value || 10),
    combine: el<HTMLSelectElement>("rule-combine").value as RuleDraft["combine"],
    comparisons: Array.from(document.querySelectorAll<HTMLElement>(".comparison-row")).map((row) => ({
      stat: row.querySelector<HTMLSelectElement>(".comp-stat")!.value,
      op: row.querySelector<HTMLSelectElement>(".comp-op")!.value,
      value: Number(row.querySelector<HTMLInputElement>(".comp-value")!.value),
      scope: row.querySelector<HTMLSelectElement>(".comp-scope")!.value,
    })),
    actions,
    maxPasses: Number(el<HTMLInputElement>("rule-passes").value || 4),
  };
}

function comparisonRow(): string {
  const stats = STAT_NAMES.map((s) => `<option>${s}</option>`).join("");
  const ops = COMPARATORS.map((o) => `<option>${o}</option>`).join("");
  const scopes = SCOPES.map((s) => `<option>${s}</option>`).join("");
  return (
    `<div class="comparison-row"><select class="comp-stat">${stats}</select>` +
    `<select class="comp-op">${ops}</select>` +
    `<input class="comp-value" type="number" step="any" value="0.7">` +
    `<select class="comp-scope">${scopes}</select></div>`
  );
}

function syncDraftFromForm(): void {
  const draft = draftFromForm();
  store.update({ ruleDraft: draft });
  const names = knownActions.map((a) => a.name);
  const errors = validateDraft(draft, names);
  el("rule-errors").innerHTML = Object.entries(errors)
    .map(([field, msg]) => `<div class="field-error" data-field="${field}">${msg}</div>`)
    .join("");
  el<HTMLButtonElement>("rule-submit").disabled = !canSubmit(draft, names);
}

async function onRuleSubmit(): Promise<void> {
  const draft = draftFromForm();
  const outcome = await submitDraft(draft, knownActions.map((a) => a.name), client);
  const status = el("rule-status");
  if (outcome.ok && outcome.registeredName) {
    status.textContent = `registered "${outcome.registeredName}" — selectable in both panes`;
    await refreshOptimizers(outcome.registeredName);
    await refreshPanes();
  } else if (outcome.serverError) {
    status.innerHTML = renderErrorCard(outcome.serverError.code, outcome.serverError.message);
  } else {
    status.textContent = "fix the highlighted fields first";
  }
}

async function onUpload(kind: "optimizer" | "action"): Promise<void> {
  const input = el<HTMLTextAreaElement>("upload-text");
  const status = el("upload-status");
  try {
    const doc = JSON.parse(input.value);
    if (kind === "optimizer") {
      const res = await client.uploadOptimizer(doc);
      status.textContent = `optimizer "${res.name}" registered`;
      await refreshOptimizers(res.name);
    } else {
      const res = await client.uploadAction(doc);
      status.textContent = `action "${res.name}" registered`;
      await refreshActions();
    }
  } catch (e) {
    showError(status, e);
  }
}

async function onBenchRun(): Promise<void> {
  const optimizers = Array.from(
    document.querySelectorAll<HTMLInputElement>(".bench-choice:checked"),
  ).map((cb) => cb.value);
  const query = store.get().selectedQuery;
  const body = {
    queries: query ? [query] : undefined,
    optimizers,
    repetitions: Number(el<HTMLInputElement>("bench-reps").value || 5),
  };
  const status = el("bench-status");
  try {
    const job = await client.submitBench(body);
    store.update({ benchJobId: job.job_id });
    status.textContent = `job ${job.job_id} queued`;
    schedulePoll();
  } catch (e) {
    showError(status, e);
  }
}

function schedulePoll(): void {
  if (pollTimer !== null) window.clearTimeout(pollTimer);
  pollTimer = window.setTimeout(pollBench, 1000);
}

async function pollBench(): Promise<void> {
  const jobId = store.get().benchJobId;
  if (!jobId) return;
  const status = el("bench-status");
  try {
    const job = await client.benchStatus(jobId);
    if (job.status === "done" && job.report) {
      lastReport = job.report;
      status.textContent = `job ${jobId} done`;
      renderBench();
    } else if (job.status === "failed") {
      status.innerHTML = renderErrorCard("JobFailed", job.error ?? "benchmark failed");
    } else {
      status.textContent = `job ${jobId}: ${job.status}...`;
      schedulePoll();
    }
  } catch (e) {
    if (e instanceof ApiError && e.status === 404) {
      status.innerHTML = renderErrorCard("StaleJob", `job ${jobId} is no longer known`);
      store.update({ benchJobId: null });
    } else {
      showError(status, e);
      schedulePoll();
    }
  }
}

function renderBench(): void {
  if (!lastReport) return;
  el("bench-dashboard").innerHTML = renderDashboard(buildDashboardModel(lastReport));
  document.querySelectorAll<HTMLElement>("#bench-dashboard .bar").forEach((bar) => {
    bar.addEventListener("click", () => {
      const run = lastReport!.runs.find(
        (r) => r.query === bar.dataset.query && r.optimizer === bar.dataset.optimizer,
      );
      el("trace-modal-body").innerHTML = run?.trace
        ? renderTrace(run.trace)
        : renderErrorCard(run?.status === "failed" ? "OptimizerFailed" : "NoTrace", run?.error ?? "no trace recorded");
      el<HTMLDialogElement>("trace-modal").showModal();
    });
  });
}

async function boot(): Promise<void> {
  el("rule-comparisons").innerHTML = comparisonRow() + comparisonRow();
  document.querySelectorAll("#rule-comparisons select, #rule-comparisons input").forEach((n) =>
    n.addEventListener("change", syncDraftFromForm),
  );
  el("rule-name").addEventListener("input", syncDraftFromForm);
  el("rule-submit").addEventListener("click", onRuleSubmit);
  el("upload-optimizer").addEventListener("click", () => onUpload("optimizer"));
  el("upload-action").addEventListener("click", () => onUpload("action"));
  el("bench-run").addEventListener("click", onBenchRun);
  el<HTMLSelectElement>("query-select").addEventListener("change", async (ev) => {
    store.selectQuery((ev.target as HTMLSelectElement).value);
    await refreshPanes();
  });
  for (const side of ["left", "right"]) {
    el(`${side}-optimizer`).addEventListener("change", async () => {
      syncPaneState();
      await refreshPanes();
    });
  }
  el("trace-modal-close").addEventListener("click", () => el<HTMLDialogElement>("trace-modal").close());

  try {
    await refreshQueries();
    await refreshActions();
    await refreshOptimizers();
    await refreshPanes();
    syncDraftFromForm();
  } catch (e) {
    showError(el("left-pane"), e);
  }
}

document.addEventListener("DOMContentLoaded", () => void boot());
