/** Plan tree view model and rendering: collapsible nodes, diff highlights,
 * hover stats, visually distinct ML calls. Rendering returns HTML strings so
 * the logic stays testable without a DOM. */

import type { DiffEntry, PlanNodeDoc, StatsDoc } from "./types.js";

export interface TreeNodeModel {
  path: string;
  kind: string;
  label: string;
  detail: string;
  mlCalls: number;
  children: TreeNodeModel[];
}

function countMlCalls(value: unknown): number {
  if (Array.isArray(value)) {
    return value.reduce((acc: number, v) => acc + countMlCalls(v), 0);
  }
  if (value && typeof value === "object") {
    const obj = value as Record<string, unknown>;
    let count = obj.kind === "ml" ? 1 : 0;
    for (const key of Object.keys(obj)) {
      if (key === "kind") continue;
      count += countMlCalls(obj[key]);
    }
    return count;
  }
  return 0;
}

function nodeLabel(doc: PlanNodeDoc): { label: string; detail: string } {
  switch (doc.kind) {
    case "scan":
      return { label: `scan ${doc.table ?? ""}`, detail: "" };
    case "filter":
      return { label: "filter", detail: "" };
    case "project":
      return { label: "project", detail: (doc.exprs ?? []).map((e) => e.name).join(", ") };
    case "join":
      return { label: `${doc.join_type ?? ""} join`, detail: "" };
    case "aggregate":
      return {
        label: "aggregate",
        detail: (doc.aggregates ?? []).map((a) => `${a.fn}(${a.name})`).join(", "),
      };
    case "limit":
      return { label: `limit ${doc.n ?? ""}`, detail: "" };
    case "sample":
      return { label: `sample ${doc.n ?? ""}`, detail: "" };
    default:
      return { label: doc.kind, detail: "" };
  }
}

export function buildTreeModel(doc: PlanNodeDoc): TreeNodeModel {
  const { label, detail } = nodeLabel(doc);
  const exprCarriers: unknown[] = [doc.exprs, doc.aggregates, doc.group_keys, doc.predicate, doc.condition];
  const children: TreeNodeModel[] = [];
  if (doc.left) children.push(buildTreeModel(doc.left));
  if (doc.right) children.push(buildTreeModel(doc.right));
  if (doc.child) children.push(buildTreeModel(doc.child));
  return {
    path: doc.path,
    kind: doc.kind,
    label,
    detail,
    mlCalls: exprCarriers.reduce((acc: number, v) => acc + countMlCalls(v), 0),
    children,
  };
}

/** Node paths a diff marks as changed; `replaced` entries highlight the
 * whole swapped subtree root. */
export function highlightPaths(entries: DiffEntry[]): Set<string> {
  return new Set(entries.map((e) => e.path));
}

export function nodeStats(stats: StatsDoc, path: string): Record<string, number> {
  const out: Record<string, number> = {};
  const node = stats.nodes[path];
  if (node) {
    for (const [name, entry] of Object.entries(node)) out[name] = entry.value;
  }
  for (const ml of stats.ml) {
    if (ml.path !== path) continue;
    for (const [name, entry] of Object.entries(ml.stats)) {
      out[`ml.${name}`] = entry.value;
    }
  }
  return out;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function statsTitle(stats: Record<string, number>): string {
  return Object.entries(stats)
    .map(([k, v]) => `${k}: ${Number.isInteger(v) ? v : v.toPrecision(4)}`)
    .join("\n");
}

export function renderTree(
  model: TreeNodeModel,
  highlights: Set<string>,
  stats: StatsDoc | null,
): string {
  const classes = ["plan-node", `plan-${model.kind}`];
  if (highlights.has(model.path)) classes.push("changed");
  if (model.mlCalls > 0) classes.push("has-ml");
  const hover = stats ? statsTitle(nodeStats(stats, model.path)) : "";
  const badge = model.mlCalls > 0 ? `<span class="ml-badge">ML x${model.mlCalls}</span>` : "";
  const header =
    `<span class="${classes.join(" ")}" data-path="${escapeHtml(model.path)}" ` +
    `title="${escapeHtml(hover)}">${escapeHtml(model.label)}${badge}` +
    (model.detail ? `<span class="node-detail">${escapeHtml(model.detail)}</span>` : "") +
    `</span>`;
  if (model.children.length === 0) {
    return `<li>${header}</li>`;
  }
  const kids = model.children.map((c) => renderTree(c, highlights, stats)).join("");
  return `<li><details open><summary>${header}</summary><ul class="plan-children">${kids}</ul></details></li>`;
}

export function renderPane(
  root: PlanNodeDoc,
  diffEntries: DiffEntry[],
  stats: StatsDoc | null,
): string {
  const model = buildTreeModel(root);
  const highlights = highlightPaths(diffEntries);
  return `<ul class="plan-tree">${renderTree(model, highlights, stats)}</ul>`;
}

export function renderErrorCard(code: string, message: string): string {
  return `<div class="error-card"><strong>${escapeHtml(code)}</strong> ${escapeHtml(message)}</div>`;
}
