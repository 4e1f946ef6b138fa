/** Benchmarking dashboard: grouped latency bars per query and optimizer,
 * failed cells flagged, equivalence verdicts as badges. Click targets carry
 * data attributes; the shell wires them to the trace viewer. */

import type { BenchReport, BenchRun } from "./types.js";

export interface BarModel {
  query: string;
  optimizer: string;
  latency: number | null;
  heightPct: number;
  failed: boolean;
  error?: string;
  matchesBaseline?: boolean;
  invocations?: number;
}

export interface GroupModel {
  query: string;
  bars: BarModel[];
}

export interface BadgeModel {
  query: string;
  pair: string;
  equivalent: boolean;
}

export interface DashboardModel {
  optimizers: string[];
  groups: GroupModel[];
  badges: BadgeModel[];
  maxLatency: number;
  failedCells: { query: string; optimizer: string; error: string }[];
}

export function buildDashboardModel(report: BenchReport): DashboardModel {
  const optimizers: string[] = [];
  const byQuery = new Map<string, BenchRun[]>();
  for (const run of report.runs) {
    if (!optimizers.includes(run.optimizer)) optimizers.push(run.optimizer);
    const list = byQuery.get(run.query) ?? [];
    list.push(run);
    byQuery.set(run.query, list);
  }
  const okLatencies = report.runs
    .filter((r) => r.status === "ok" && typeof r.latency_ms === "number")
    .map((r) => r.latency_ms as number);
  const maxLatency = okLatencies.length ? Math.max(...okLatencies) : 1;

  const groups: GroupModel[] = [];
  const failedCells: DashboardModel["failedCells"] = [];
  for (const [query, runs] of byQuery) {
    const bars: BarModel[] = [];
    for (const name of optimizers) {
      const run = runs.find((r) => r.optimizer === name);
      if (!run) continue;
      if (run.status === "failed") {
        bars.push({ query, optimizer: name, latency: null, heightPct: 0, failed: true, error: run.error });
        failedCells.push({ query, optimizer: name, error: run.error ?? "failed" });
      } else {
        const latency = run.latency_ms ?? 0;
        bars.push({
          query,
          optimizer: name,
          latency,
          heightPct: Math.max(2, Math.round((latency / maxLatency) * 100)),
          failed: false,
          matchesBaseline: run.matches_baseline,
          invocations: run.ml_call_invocations,
        });
      }
    }
    groups.push({ query, bars });
  }

  const badges: BadgeModel[] = [];
  for (const [query, pairs] of Object.entries(report.equivalence)) {
    for (const [pair, ok] of Object.entries(pairs)) {
      badges.push({ query, pair, equivalent: ok });
    }
  }
  return { optimizers, groups, badges, maxLatency, failedCells };
}

function esc(text: string): string {
  return text.replaceAll("&", "&amp;").replaceAll("<", "&lt;").replaceAll(">", "&gt;").replaceAll('"', "&quot;");
}

export function renderDashboard(model: DashboardModel): string {
  const legend = model.optimizers
    .map((o, i) => `<span class="legend-item c${i % 6}">${esc(o)}</span>`)
    .join("");
  const groups = model.groups
    .map((g) => {
      const bars = g.bars
        .map((b) => {
          const idx = model.optimizers.indexOf(b.optimizer) % 6;
          if (b.failed) {
            return (
              `<div class="bar failed" data-query="${esc(b.query)}" data-optimizer="${esc(b.optimizer)}" ` +
              `title="${esc(b.error ?? "failed")}">&#10007;</div>`
            );
          }
          const title = `${b.optimizer}: ${b.latency?.toFixed(1)} ms` +
            (b.invocations != null ? `, ${b.invocations} ML calls` : "");
          return (
            `<div class="bar c${idx}" style="height:${b.heightPct}%" ` +
            `data-query="${esc(b.query)}" data-optimizer="${esc(b.optimizer)}" title="${esc(title)}"></div>`
          );
        })
        .join("");
      return `<div class="bar-group"><div class="bars">${bars}</div><div class="group-label">${esc(g.query)}</div></div>`;
    })
    .join("");
  const badges = model.badges
    .map(
      (b) =>
        `<span class="badge ${b.equivalent ? "ok" : "bad"}" title="${esc(b.query)}">` +
        `${esc(b.query)}: ${esc(b.pair)} ${b.equivalent ? "&#10003;" : "&#10007;"}</span>`,
    )
    .join("");
  const failures = model.failedCells.length
    ? `<div class="failed-cells">failed cells: ${model.failedCells
        .map((f) => `${esc(f.query)} x ${esc(f.optimizer)}`)
        .join(", ")}</div>`
    : "";
  return (
    `<div class="dashboard"><div class="legend">${legend}</div>` +
    `<div class="chart">${groups}</div>${failures}` +
    `<div class="equivalence">${badges}</div></div>`
  );
}
