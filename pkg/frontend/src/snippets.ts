/**
 * Insertable graph-query snippets derived from the schema, so the DSL's
 * edge and entity vocabulary is discoverable without memorizing it.
 */

import type { SchemaWire } from "./api";

export interface Snippet {
  label: string;
  text: string;
}

export function querySnippets(schema: SchemaWire): Snippet[] {
  const snippets: Snippet[] = [
    { label: "capture", text: "(?<name> [entity=B-Reagent][entity=I-Reagent]*)" },
    { label: "wildcard run", text: "[]{1,10}" },
    { label: "word alt", text: "[word=ml|word=l]" },
  ];
  for (const edge of schema.edge_labels) {
    snippets.push({ label: `>${edge}`, text: `>${edge} ` });
    snippets.push({ label: `<${edge}`, text: `<${edge} ` });
  }
  for (const node of schema.node_labels) {
    snippets.push({ label: node, text: `[entity=B-${node}]` });
  }
  return snippets;
}

/** Insert text at the editor's cursor, leaving the cursor after it. */
export function insertAtCursor(editor: HTMLTextAreaElement, text: string): void {
  const start = editor.selectionStart ?? editor.value.length;
  const end = editor.selectionEnd ?? editor.value.length;
  editor.value = editor.value.slice(0, start) + text + editor.value.slice(end);
  const cursor = start + text.length;
  editor.selectionStart = cursor;
  editor.selectionEnd = cursor;
  editor.dispatchEvent(new Event("input", { bubbles: true }));
}
