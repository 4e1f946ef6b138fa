/** Statistics window: per-query summary table plus per-node listing
 * (per-node values also surface as hover titles in the plan panes). */

import type { StatsDoc } from "./types.js";

export interface StatsRow {
  path: string;
  name: string;
  value: number;
  source: string;
}

export function statsRows(stats: StatsDoc): StatsRow[] {
  const rows: StatsRow[] = [];
  for (const [path, entries] of Object.entries(stats.nodes)) {
    for (const [name, entry] of Object.entries(entries)) {
      rows.push({ path, name, value: entry.value, source: entry.source });
    }
  }
  for (const ml of stats.ml) {
    for (const [name, entry] of Object.entries(ml.stats)) {
      rows.push({ path: `${ml.path} [ml ${ml.call_path || "root"}]`, name, value: entry.value, source: entry.source });
    }
  }
  return rows;
}

function esc(text: string): string {
  return text.replaceAll("&", "&amp;").replaceAll("<", "&lt;").replaceAll(">", "&gt;");
}

function fmt(v: number): string {
  if (Number.isInteger(v)) return String(v);
  if (Math.abs(v) >= 1000) return v.toExponential(3);
  return v.toPrecision(4);
}

export function renderStatsTable(stats: StatsDoc): string {
  const rows = statsRows(stats)
    .map(
      (r) =>
        `<tr><td>${esc(r.path)}</td><td>${esc(r.name)}</td>` +
        `<td class="num">${fmt(r.value)}</td><td class="src-${r.source}">${r.source}</td></tr>`,
    )
    .join("");
  return (
    `<table class="stats-table"><thead><tr><th>node</th><th>statistic</th>` +
    `<th>value</th><th>source</th></tr></thead><tbody>${rows}</tbody></table>` +
    `<div class="stats-note">sample size: ${stats.sample_size || "off"}</div>`
  );
}
