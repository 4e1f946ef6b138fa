/** Decision trace rendering: fired rules, structural deltas, search events. */

import type { TraceDoc } from "./types.js";

function esc(text: string): string {
  return text.replaceAll("&", "&amp;").replaceAll("<", "&lt;").replaceAll(">", "&gt;");
}

function describeEvent(e: { kind: string } & Record<string, unknown>): string {
  switch (e.kind) {
    case "rule-fired": {
      const snap = e.predicate_snapshot as Record<string, number> | undefined;
      const details = snap
        ? Object.entries(snap)
            .map(([k, v]) => `${k} (= ${typeof v === "number" ? v.toPrecision(4) : v})`)
            .join(", ")
        : "";
      return `rule fired: ${e.rule}${details ? ` — ${details}` : ""}`;
    }
    case "action-applied":
      return `action applied: ${e.action} at ${e.node_path} — ${e.description}`;
    case "plan-scored":
      return `plan scored: ${String(e.hash).slice(0, 10)} cost ${(e.cost as number).toPrecision(6)}`;
    case "plan-pruned":
      return `plan pruned: ${String(e.hash).slice(0, 10)}`;
    case "best-updated":
      return `best updated: ${String(e.hash).slice(0, 10)} cost ${(e.cost as number).toPrecision(6)}`;
    default:
      return e.kind;
  }
}

export function renderTrace(trace: TraceDoc | null): string {
  if (!trace) {
    return `<div class="trace empty">no optimizer selected</div>`;
  }
  const applied = trace.applied_actions.length
    ? trace.applied_actions.map((a) => esc(a.action)).join(" → ")
    : "no rewrites applied";
  const events = trace.events
    .map((e) => `<li class="event-${esc(e.kind)}">${esc(describeEvent(e))}</li>`)
    .join("");
  const cost = trace.final_cost != null ? trace.final_cost.toPrecision(6) : "-";
  return (
    `<div class="trace"><div class="trace-summary">${applied}` +
    ` <span class="trace-cost">final cost ${cost}</span>` +
    ` <span class="trace-time">${trace.elapsed_ms.toFixed(1)} ms</span></div>` +
    `<ol class="trace-events">${events}</ol></div>`
  );
}
