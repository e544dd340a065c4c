/**
 * The form-state to request-body mapping is a wire contract: for each form
 * state the serialized body must equal the documented JSON byte-for-byte.
 */

import { describe, expect, it } from "vitest";

import {
  QueryFormState,
  emptyState,
  toAggregateBody,
  toSearchBody,
} from "../src/state";
import { Q7_QUERY, Q9_QUERY, SLOT_NAMES } from "./fixtures";

function stateWith(partial: {
  slots?: Record<string, string>;
  graph?: string;
  page?: number;
}): QueryFormState {
  const state = emptyState(SLOT_NAMES);
  Object.assign(state.slots, partial.slots ?? {});
  state.graph = partial.graph ?? "";
  state.page = partial.page ?? 0;
  return state;
}

function body(state: QueryFormState): string {
  return JSON.stringify(toSearchBody(state));
}

describe("search body fidelity", () => {
  it("slot form: reagent + any-solvent", () => {
    const state = stateWith({
      slots: { reagent: "triphosgene", solvent: "?" },
    });
    expect(body(state)).toBe(
      '{"slot_query":{"reagent":"triphosgene","solvent":"?"}}',
    );
  });

  it("slot form: product + any-yield", () => {
    const state = stateWith({
      slots: {
        product: "(5-Methylpyrimidin-2-yl)methanol",
        yield_percent: "?",
      },
    });
    expect(body(state)).toBe(
      '{"slot_query":{"product":"(5-Methylpyrimidin-2-yl)methanol","yield_percent":"?"}}',
    );
  });

  it("slot form: OR alternation travels verbatim, keys in schema order", () => {
    const state = stateWith({
      slots: { reagent: "CDI OR carbonyldiimidazole", reaction_time: "?" },
    });
    expect(body(state)).toBe(
      '{"slot_query":{"reaction_time":"?","reagent":"CDI OR carbonyldiimidazole"}}',
    );
  });

  it("three-slot form", () => {
    const state = stateWith({
      slots: {
        reagent: "chlorosulfonic acid",
        solvent: "chlorobenzene",
        product: "?",
      },
    });
    expect(body(state)).toBe(
      '{"slot_query":{"product":"?","reagent":"chlorosulfonic acid","solvent":"chlorobenzene"}}',
    );
  });

  it("graph editor only", () => {
    const state = stateWith({ graph: Q9_QUERY });
    expect(body(state)).toBe(JSON.stringify({ graph_query: Q9_QUERY }));
  });

  it("graph + slot combined, graph_query first", () => {
    const state = stateWith({
      graph: Q7_QUERY,
      slots: { solvent: "DMF" },
    });
    expect(body(state)).toBe(
      JSON.stringify({ graph_query: Q7_QUERY, slot_query: { solvent: "DMF" } }),
    );
  });

  it("page cursor adds offset/limit; first page omits it", () => {
    expect(body(stateWith({ graph: "diluted", page: 0 }))).toBe(
      '{"graph_query":"diluted"}',
    );
    expect(body(stateWith({ graph: "diluted", page: 2 }))).toBe(
      '{"graph_query":"diluted","page":{"offset":40,"limit":20}}',
    );
  });

  it("blank and whitespace-only fields stay out of the body", () => {
    const state = stateWith({
      graph: "   ",
      slots: { reagent: "x", solvent: "  " },
    });
    expect(body(state)).toBe('{"slot_query":{"reagent":"x"}}');
  });
});

describe("aggregate body fidelity", () => {
  it("capture rides on the search body, unpaginated", () => {
    const state = stateWith({ graph: Q7_QUERY, page: 3 });
    expect(JSON.stringify(toAggregateBody(state, "reagent"))).toBe(
      JSON.stringify({ graph_query: Q7_QUERY, capture: "reagent" }),
    );
  });

  it("sampling fields appear only when requested", () => {
    const state = stateWith({ slots: { solvent: "?" } });
    expect(JSON.stringify(toAggregateBody(state, "solvent", 50, 7))).toBe(
      '{"slot_query":{"solvent":"?"},"capture":"solvent","sample_k":50,"seed":7}',
    );
  });
});
