import { describe, expect, it } from "vitest";

import {
  buildTreeModel,
  highlightPaths,
  nodeStats,
  renderErrorCard,
  renderPane,
} from "../src/planView.js";
import { diffFixture, planFixture, pushedPlanFixture, statsFixture } from "./fixtures.js";

function highlightedPathsIn(html: string): string[] {
  const out: string[] = [];
  const re = /class="([^"]*)" data-path="([^"]*)"/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(html)) !== null) {
    if (m[1].includes("changed")) out.push(m[2]);
  }
  return out.sort();
}

describe("tree model", () => {
  it("mirrors the plan structure with path ids", () => {
    const model = buildTreeModel(planFixture);
    expect(model.path).toBe("root");
    expect(model.kind).toBe("project");
    expect(model.children).toHaveLength(1);
    expect(model.children[0].path).toBe("0");
    expect(model.children[0].children.map((c) => c.path)).toEqual(["0.0", "0.1"]);
  });

  it("marks ML-bearing nodes", () => {
    const model = buildTreeModel(planFixture);
    expect(model.mlCalls).toBe(2); // sigmoid + nested matmul
    expect(model.children[0].mlCalls).toBe(0);
  });
});

describe("diff highlighting", () => {
  it("panes highlight exactly the nodes the diff names", () => {
    const highlights = highlightPaths(diffFixture);
    expect(highlights).toEqual(new Set(["root", "0.0"]));
    const left = renderPane(planFixture, diffFixture, statsFixture);
    expect(highlightedPathsIn(left)).toEqual(["0.0", "root"]);
    const right = renderPane(pushedPlanFixture, diffFixture, statsFixture);
    expect(highlightedPathsIn(right)).toEqual(["0.0", "root"]);
  });

  it("identical optimizers produce zero highlights", () => {
    const html = renderPane(planFixture, [], statsFixture);
    expect(highlightedPathsIn(html)).toEqual([]);
  });
});

describe("stats on hover", () => {
  it("merges node and ML-call statistics for a path", () => {
    const stats = nodeStats(statsFixture, "root");
    expect(stats.est_cardinality).toBe(100000);
    expect(stats["ml.sparsity"]).toBeCloseTo(0.9);
  });

  it("renders hover titles into the pane", () => {
    const html = renderPane(planFixture, [], statsFixture);
    expect(html).toContain("est_cardinality: 100000");
    expect(html).toContain("ml.sparsity");
  });
});

describe("large plans and errors", () => {
  it("renders a 50+ node plan without dropping nodes", () => {
    // deep chain: 50 filters over a scan
    let node: any = { kind: "scan", path: "0".repeat(0) || "x", table: "t", schema: [] };
    let path = "";
    const paths: string[] = [];
    node = { kind: "scan", path: "leaf", table: "t", schema: [] };
    for (let i = 0; i < 50; i++) {
      path = path ? `${path}.0` : "0";
      paths.push(path);
    }
    // build bottom-up with correct path ids
    let current: any = { kind: "scan", path: paths[paths.length - 1] ?? "root", table: "t", schema: [] };
    for (let i = paths.length - 2; i >= 0; i--) {
      current = { kind: "filter", path: paths[i], predicate: { kind: "col", name: "a" }, child: current };
    }
    const root = { kind: "project", path: "root", exprs: [], child: current };
    const html = renderPane(root as never, [], null);
    const nodeCount = (html.match(/data-path=/g) ?? []).length;
    expect(nodeCount).toBe(51);
  });

  it("error card escapes payloads", () => {
    const html = renderErrorCard("ParseError", '<script>alert("x")</script>');
    expect(html).not.toContain("<script>");
    expect(html).toContain("ParseError");
  });
});
