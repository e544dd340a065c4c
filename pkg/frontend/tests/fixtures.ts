/** Shared wire fixtures for the test suite. */

import type { MatchWire, SchemaWire } from "../src/api";

export const SLOT_NAMES = [
  "example_label",
  "other_compound",
  "product",
  "reaction_time",
  "reagent",
  "solvent",
  "starting_material",
  "temperature",
  "yield_other",
  "yield_percent",
];

export const SCHEMA: SchemaWire = {
  node_labels: ["Action", "Amount", "Generic-Measure", "Reagent", "pH"],
  edge_labels: ["acts-on", "measure", "setting", "using"],
  slot_names: SLOT_NAMES,
  corpus_stats: { procedures: 1000, sentences: 4100, terms: 1500 },
};

export const Q7_QUERY =
  "plasma <acts-on diluted >using " +
  "(?<reagent> [entity=B-Reagent][entity=I-Reagent]*)";

export const Q9_QUERY =
  "PTFE filter >measure " +
  "(?<pore_size> [entity=B-Generic-Measure][entity=I-Generic-Measure]*)";

/** API response for the Q7 query over the dilution hand-trace sentence. */
export const Q7_MATCH: MatchWire = {
  doc_id: "trace-dilution",
  sentence_index: 0,
  text: "plasma was diluted using saline buffer .",
  span: [0, 6],
  captures: {
    reagent: { span: [4, 6], text: "saline buffer" },
  },
};

/** API response for the coupling (mass-unit) query over the Q10 fixture. */
export const Q10_MATCH: MatchWire = {
  doc_id: "trace-coupling",
  sentence_index: 0,
  text: "Dissolve HATU ( 380 mg ) in DMF ( 1 ml ) and stir .",
  span: [1, 11],
  captures: {
    mole: { span: [3, 5], text: "380 mg" },
    volume: { span: [9, 11], text: "1 ml" },
  },
};
