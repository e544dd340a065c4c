/**
 * Query form state and its mapping onto API request bodies.
 *
 * The mapping is the contract under test: for a given form state the
 * serialized body must match the documented wire shape byte-for-byte
 * (key order included), so nothing here depends on live DOM state.
 */

import type { AggregateBody, SearchBody } from "./api";

export const PAGE_LIMIT = 20;

export interface QueryFormState {
  /** Slot name -> typed filter text, in schema order. Blank = inactive. */
  slots: Record<string, string>;
  /** Free-text graph query editor contents. */
  graph: string;
  /** Zero-based page cursor. */
  page: number;
}

export function emptyState(slotNames: string[]): QueryFormState {
  const slots: Record<string, string> = {};
  for (const name of slotNames) slots[name] = "";
  return { slots, graph: "", page: 0 };
}

/** Submit precondition: at least one field carries a query. */
export function canSubmit(state: QueryFormState): boolean {
  if (state.graph.trim() !== "") return true;
  return Object.values(state.slots).some((value) => value.trim() !== "");
}

/** Slot names with a non-blank filter, in schema (insertion) order. */
export function activeSlots(state: QueryFormState): string[] {
  return Object.keys(state.slots).filter(
    (name) => state.slots[name].trim() !== "",
  );
}

/**
 * Build the POST /api/search body.
 *
 * Field values travel verbatim ("?" stays "?", " OR " stays literal); the
 * first page omits the page object so the body matches the documented
 * minimal form.
 */
export function toSearchBody(state: QueryFormState): SearchBody {
  const body: SearchBody = {};
  if (state.graph.trim() !== "") {
    body.graph_query = state.graph;
  }
  const active = activeSlots(state);
  if (active.length > 0) {
    const slotQuery: Record<string, string> = {};
    for (const name of active) slotQuery[name] = state.slots[name];
    body.slot_query = slotQuery;
  }
  if (state.page > 0) {
    body.page = { offset: state.page * PAGE_LIMIT, limit: PAGE_LIMIT };
  }
  return body;
}

/** Build the POST /api/aggregate body (aggregation is never paginated). */
export function toAggregateBody(
  state: QueryFormState,
  capture: string,
  sampleK?: number,
  seed?: number,
): AggregateBody {
  const search = toSearchBody({ ...state, page: 0 });
  const body: AggregateBody = { ...search, capture };
  if (sampleK !== undefined) {
    body.sample_k = sampleK;
    body.seed = seed ?? 0;
  }
  return body;
}

/** Capture names declared in a graph query, in appearance order. */
export function extractCaptureNames(graph: string): string[] {
  const names: string[] = [];
  const pattern = /\(\?<([A-Za-z_][A-Za-z0-9_]*)>/g;
  let hit: RegExpExecArray | null;
  while ((hit = pattern.exec(graph)) !== null) names.push(hit[1]);
  return names;
}

/** Names the aggregate panel may offer for the current state. */
export function aggregatableCaptures(
  state: QueryFormState,
  slotNames: string[],
): string[] {
  if (state.graph.trim() !== "") return extractCaptureNames(state.graph);
  return activeSlots(state).filter((name) => slotNames.includes(name));
}

/**
 * Refine the query with a clicked aggregate answer.
 *
 * A slot capture narrows that slot field to the clicked value; a graph
 * capture appends the value to the editor as literal tokens. Returns a new
 * state reset to the first page.
 */
export function refineWithAnswer(
  state: QueryFormState,
  capture: string,
  answer: string,
): QueryFormState {
  const next: QueryFormState = {
    slots: { ...state.slots },
    graph: state.graph,
    page: 0,
  };
  if (capture in next.slots && state.graph.trim() === "") {
    next.slots[capture] = answer;
  } else {
    next.graph = state.graph.trimEnd() === ""
      ? answer
      : `${state.graph.trimEnd()} ${answer}`;
  }
  return next;
}

/** Caret line pointing at a parse error offset, for <pre> display. */
export function errorCaret(query: string, position: number): string {
  const clamped = Math.max(0, Math.min(position, query.length));
  return `${query}\n${" ".repeat(clamped)}^`;
}
