/** Structured rule editor: dropdown statistic, comparator, literal, action
 * multi-select. Drafts validate client-side against the statistic and
 * action catalogs before anything is posted. */

import type { Client } from "./api.js";
import { COMPARATORS, SCOPES, STAT_NAMES } from "./types.js";

export interface ComparisonDraft {
  stat: string;
  op: string;
  value: number;
  scope: string;
}

export interface ActionChoice {
  action: string;
  params: Record<string, unknown>;
}

export interface RuleDraft {
  name: string;
  priority: number;
  combine: "all_of" | "any_of";
  comparisons: ComparisonDraft[];
  actions: ActionChoice[];
  maxPasses: number;
}

export interface DraftErrors {
  [field: string]: string;
}

export function validateDraft(draft: RuleDraft, knownActions: string[]): DraftErrors {
  const errors: DraftErrors = {};
  if (!draft.name.trim()) {
    errors.name = "profile name is required";
  } else if (!/^[A-Za-z0-9_\-./ ]+$/.test(draft.name)) {
    errors.name = "name may use letters, digits, and -_./";
  }
  if (draft.comparisons.length === 0) {
    errors.comparisons = "add at least one condition";
  }
  draft.comparisons.forEach((c, i) => {
    if (!(STAT_NAMES as readonly string[]).includes(c.stat)) {
      errors[`comparisons.${i}.stat`] = `unknown statistic "${c.stat}"`;
    }
    if (!(COMPARATORS as readonly string[]).includes(c.op)) {
      errors[`comparisons.${i}.op`] = `unknown comparator "${c.op}"`;
    }
    if (!Number.isFinite(c.value)) {
      errors[`comparisons.${i}.value`] = "literal must be a number";
    }
    if (!(SCOPES as readonly string[]).includes(c.scope)) {
      errors[`comparisons.${i}.scope`] = `unknown scope "${c.scope}"`;
    }
  });
  if (draft.actions.length === 0) {
    errors.actions = "select at least one action";
  }
  draft.actions.forEach((a, i) => {
    if (!knownActions.includes(a.action)) {
      errors[`actions.${i}`] = `unknown action "${a.action}"`;
    }
  });
  if (!Number.isInteger(draft.maxPasses) || draft.maxPasses < 1) {
    errors.maxPasses = "passes must be a positive integer";
  }
  return errors;
}

export function canSubmit(draft: RuleDraft, knownActions: string[]): boolean {
  return Object.keys(validateDraft(draft, knownActions)).length === 0;
}

/** Serialize a draft into an optbench-optimizer/1 document. */
export function draftToDocument(draft: RuleDraft): Record<string, unknown> {
  const leaves = draft.comparisons.map((c) => ({
    stat: c.stat,
    op: c.op,
    value: c.value,
    scope: c.scope,
  }));
  const predicate = leaves.length === 1 ? leaves[0] : { [draft.combine]: leaves };
  return {
    format: "optbench-optimizer/1",
    name: draft.name.trim(),
    kind: "rule-based",
    max_passes: draft.maxPasses,
    rules: [
      {
        name: `${draft.name.trim()}-rule`,
        priority: draft.priority,
        predicate,
        actions: draft.actions.map((a) =>
          Object.keys(a.params).length ? { action: a.action, params: a.params } : { action: a.action },
        ),
      },
    ],
  };
}

export interface SubmitOutcome {
  ok: boolean;
  registeredName?: string;
  errors?: DraftErrors;
  serverError?: { code: string; message: string };
}

/** Validate, post, and report either the registered name or field errors. */
export async function submitDraft(
  draft: RuleDraft,
  knownActions: string[],
  client: Client,
): Promise<SubmitOutcome> {
  const errors = validateDraft(draft, knownActions);
  if (Object.keys(errors).length > 0) {
    return { ok: false, errors };
  }
  try {
    const registered = await client.uploadOptimizer(draftToDocument(draft));
    return { ok: true, registeredName: registered.name };
  } catch (e) {
    const err = e as { code?: string; message: string };
    return {
      ok: false,
      serverError: { code: err.code ?? "Error", message: err.message },
    };
  }
}

/** Canned scenario draft: large join output and sparse features trigger
 * pushdown followed by sparse kernel selection. */
export function scenarioDraft(name: string): RuleDraft {
  return {
    name,
    priority: 10,
    combine: "all_of",
    comparisons: [
      { stat: "est_cardinality", op: ">", value: 5000, scope: "any" },
      { stat: "sparsity", op: ">", value: 0.7, scope: "any" },
    ],
    actions: [
      { action: "MLDecompositionPushdown", params: {} },
      { action: "MatMulDense2Sparse", params: { min_rows: 1000 } },
    ],
    maxPasses: 4,
  };
}
