import { describe, expect, it } from "vitest";

import { buildDashboardModel, renderDashboard } from "../src/dashboard.js";
import { reportFixture } from "./fixtures.js";

describe("dashboard model", () => {
  it("groups bars per query and optimizer", () => {
    const model = buildDashboardModel(reportFixture);
    expect(model.optimizers).toEqual(["no-op", "rule-sparse-pushdown", "user/broken"]);
    expect(model.groups).toHaveLength(1);
    expect(model.groups[0].bars).toHaveLength(3);
  });

  it("scales bar heights to the slowest ok cell", () => {
    const model = buildDashboardModel(reportFixture);
    const [noop, rule] = model.groups[0].bars;
    expect(noop.heightPct).toBe(100);
    expect(rule.heightPct).toBe(Math.round((430 / 640) * 100));
  });

  it("flags the failed cell without dropping the chart", () => {
    const model = buildDashboardModel(reportFixture);
    const failed = model.groups[0].bars.find((b) => b.optimizer === "user/broken");
    expect(failed?.failed).toBe(true);
    expect(failed?.error).toContain("boom");
    expect(model.failedCells).toEqual([
      { query: "Q_UC10", optimizer: "user/broken", error: "RuntimeError: boom" },
    ]);
  });

  it("exposes equivalence verdicts as badges", () => {
    const model = buildDashboardModel(reportFixture);
    expect(model.badges).toEqual([
      { query: "Q_UC10", pair: "no-op|rule-sparse-pushdown", equivalent: true },
    ]);
  });
});

describe("dashboard rendering", () => {
  it("renders two bars plus a flagged failure", () => {
    const html = renderDashboard(buildDashboardModel(reportFixture));
    expect((html.match(/class="bar c\d"/g) ?? []).length).toBe(2);
    expect(html).toContain('class="bar failed"');
    expect(html).toContain("failed cells: Q_UC10 x user/broken");
    expect(html).toContain('class="badge ok"');
  });

  it("bars carry data attributes for trace navigation", () => {
    const html = renderDashboard(buildDashboardModel(reportFixture));
    expect(html).toContain('data-query="Q_UC10" data-optimizer="rule-sparse-pushdown"');
    expect(html).toContain('data-query="Q_UC10" data-optimizer="user/broken"');
  });
});
