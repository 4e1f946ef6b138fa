/** Central UI state: one selected query drives both comparison panes. */

import type { RuleDraft } from "./ruleEditor.js";

export interface UiState {
  selectedQuery: string | null;
  leftOptimizer: string;
  rightOptimizer: string;
  ruleDraft: RuleDraft;
  benchJobId: string | null;
  openPanels: Record<string, boolean>;
}

export function initialDraft(): RuleDraft {
  return {
    name: "",
    priority: 10,
    combine: "all_of",
    comparisons: [{ stat: "sparsity", op: ">", value: 0.7, scope: "any" }],
    actions: [],
    maxPasses: 4,
  };
}

export function initialState(): UiState {
  return {
    selectedQuery: null,
    leftOptimizer: "no-op",
    rightOptimizer: "rule-sparse-pushdown",
    ruleDraft: initialDraft(),
    benchJobId: null,
    openPanels: {},
  };
}

type Listener = (state: UiState) => void;

export class Store {
  private state: UiState;
  private listeners: Listener[] = [];

  constructor(state: UiState = initialState()) {
    this.state = state;
  }

  get(): UiState {
    return this.state;
  }

  update(patch: Partial<UiState>): UiState {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
    return this.state;
  }

  /** Both panes always render plans of the same query. */
  selectQuery(query: string): UiState {
    return this.update({ selectedQuery: query });
  }

  setPaneOptimizers(left: string, right: string): UiState {
    return this.update({ leftOptimizer: left, rightOptimizer: right });
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }
}
