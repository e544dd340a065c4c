/**
 * Page wiring: schema-driven form, search + aggregate flows, procedure
 * detail routing. At most one search is in flight; responses from a
 * superseded submit are discarded.
 */

import {
  AggregateResponseWire,
  ApiError,
  SchemaWire,
  SearchResponseWire,
  aggregateRequest,
  procedureRequest,
  schemaRequest,
  searchRequest,
} from "./api";
import { renderSentence } from "./highlight";
import { renderProcedure } from "./procedure";
import { insertAtCursor, querySnippets } from "./snippets";
import {
  PAGE_LIMIT,
  QueryFormState,
  aggregatableCaptures,
  canSubmit,
  emptyState,
  errorCaret,
  refineWithAnswer,
  toAggregateBody,
  toSearchBody,
} from "./state";

interface Elements {
  slotInputs: Map<string, HTMLInputElement>;
  graphEditor: HTMLTextAreaElement;
  submitButton: HTMLButtonElement;
  errorBox: HTMLElement;
  results: HTMLElement;
  resultsHeading: HTMLElement;
  pageInfo: HTMLElement;
  prevButton: HTMLButtonElement;
  nextButton: HTMLButtonElement;
  captureSelect: HTMLSelectElement;
  aggregateButton: HTMLButtonElement;
  aggregateOut: HTMLElement;
  searchView: HTMLElement;
  procedureView: HTMLElement;
}

export class App {
  readonly schema: SchemaWire;
  state: QueryFormState;
  private readonly els: Elements;
  private seq = 0;
  private lastResponse: SearchResponseWire | null = null;

  static async mount(root: HTMLElement): Promise<App> {
    const schema = await schemaRequest();
    return new App(root, schema);
  }

  constructor(root: HTMLElement, schema: SchemaWire) {
    this.schema = schema;
    this.state = emptyState(schema.slot_names);
    this.els = this.buildDom(root);
    this.syncControls();
    window.addEventListener("hashchange", () => void this.route());
    void this.route();
  }

  private buildDom(root: HTMLElement): Elements {
    root.innerHTML = "";

    const searchView = document.createElement("div");
    searchView.className = "layout";

    // query panel
    const queryPanel = document.createElement("section");
    queryPanel.className = "panel";
    queryPanel.appendChild(heading("Query"));

    const slotForm = document.createElement("div");
    slotForm.className = "slot-form";
    const slotInputs = new Map<string, HTMLInputElement>();
    for (const name of this.schema.slot_names) {
      const row = document.createElement("label");
      row.className = "slot-row";
      const caption = document.createElement("span");
      caption.textContent = name;
      const input = document.createElement("input");
      input.type = "text";
      input.name = `slot-${name}`;
      input.placeholder = '"?" matches any value';
      input.addEventListener("input", () => {
        this.state.slots[name] = input.value;
        this.state.page = 0;
        this.syncControls();
      });
      row.appendChild(caption);
      row.appendChild(input);
      slotForm.appendChild(row);
      slotInputs.set(name, input);
    }
    queryPanel.appendChild(slotForm);

    const editorLabel = document.createElement("label");
    editorLabel.className = "graph-label";
    editorLabel.textContent = "Graph query";
    const graphEditor = document.createElement("textarea");
    graphEditor.rows = 3;
    graphEditor.id = "graph-editor";
    graphEditor.addEventListener("input", () => {
      this.state.graph = graphEditor.value;
      this.state.page = 0;
      this.syncControls();
    });
    editorLabel.appendChild(graphEditor);
    queryPanel.appendChild(editorLabel);

    const snippetBar = document.createElement("div");
    snippetBar.className = "snippet-bar";
    for (const snippet of querySnippets(this.schema)) {
      const chip = document.createElement("button");
      chip.type = "button";
      chip.className = "snippet";
      chip.textContent = snippet.label;
      chip.addEventListener("click", () => {
        insertAtCursor(graphEditor, snippet.text);
        graphEditor.focus();
      });
      snippetBar.appendChild(chip);
    }
    queryPanel.appendChild(snippetBar);

    const controls = document.createElement("div");
    controls.className = "controls";
    const submitButton = document.createElement("button");
    submitButton.id = "submit";
    submitButton.textContent = "Search";
    submitButton.addEventListener("click", () => void this.submit());
    controls.appendChild(submitButton);
    const stats = document.createElement("span");
    stats.className = "corpus-stats";
    stats.textContent =
      `${this.schema.corpus_stats.procedures.toLocaleString()} procedures / ` +
      `${this.schema.corpus_stats.sentences.toLocaleString()} sentences`;
    controls.appendChild(stats);
    queryPanel.appendChild(controls);

    const errorBox = document.createElement("div");
    errorBox.className = "error-box";
    errorBox.hidden = true;
    queryPanel.appendChild(errorBox);
    searchView.appendChild(queryPanel);

    // results panel
    const resultsPanel = document.createElement("section");
    resultsPanel.className = "panel";
    const resultsHeading = heading("Results");
    resultsPanel.appendChild(resultsHeading);
    const results = document.createElement("div");
    results.id = "results";
    resultsPanel.appendChild(results);

    const pager = document.createElement("div");
    pager.className = "pager";
    const prevButton = document.createElement("button");
    prevButton.textContent = "← prev";
    prevButton.addEventListener("click", () => void this.turnPage(-1));
    const pageInfo = document.createElement("span");
    pageInfo.id = "page-info";
    const nextButton = document.createElement("button");
    nextButton.textContent = "next →";
    nextButton.addEventListener("click", () => void this.turnPage(1));
    pager.appendChild(prevButton);
    pager.appendChild(pageInfo);
    pager.appendChild(nextButton);
    resultsPanel.appendChild(pager);
    searchView.appendChild(resultsPanel);

    // aggregate panel
    const aggregatePanel = document.createElement("section");
    aggregatePanel.className = "panel";
    aggregatePanel.appendChild(heading("Answers"));
    const aggregateControls = document.createElement("div");
    aggregateControls.className = "controls";
    const captureSelect = document.createElement("select");
    captureSelect.id = "capture-select";
    const aggregateButton = document.createElement("button");
    aggregateButton.id = "aggregate";
    aggregateButton.textContent = "Aggregate";
    aggregateButton.addEventListener("click", () => void this.aggregate());
    aggregateControls.appendChild(captureSelect);
    aggregateControls.appendChild(aggregateButton);
    aggregatePanel.appendChild(aggregateControls);
    const aggregateOut = document.createElement("div");
    aggregateOut.id = "aggregate-out";
    aggregatePanel.appendChild(aggregateOut);
    searchView.appendChild(aggregatePanel);

    const procedureView = document.createElement("div");
    procedureView.id = "procedure-view";
    procedureView.hidden = true;

    root.appendChild(searchView);
    root.appendChild(procedureView);
    return {
      slotInputs,
      graphEditor,
      submitButton,
      errorBox,
      results,
      resultsHeading,
      pageInfo,
      prevButton,
      nextButton,
      captureSelect,
      aggregateButton,
      aggregateOut,
      searchView,
      procedureView,
    };
  }

  /** Push form state into the inputs (after programmatic refinement). */
  private syncForm(): void {
    for (const [name, input] of this.els.slotInputs) {
      input.value = this.state.slots[name] ?? "";
    }
    this.els.graphEditor.value = this.state.graph;
    this.syncControls();
  }

  private syncControls(): void {
    this.els.submitButton.disabled = !canSubmit(this.state);
    const captures = aggregatableCaptures(this.state, this.schema.slot_names);
    const select = this.els.captureSelect;
    const current = select.value;
    select.innerHTML = "";
    for (const name of captures) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      select.appendChild(option);
    }
    if (captures.includes(current)) select.value = current;
    this.els.aggregateButton.disabled = captures.length === 0;
  }

  private showError(err: unknown): void {
    const box = this.els.errorBox;
    box.innerHTML = "";
    box.hidden = false;
    const message = document.createElement("p");
    if (err instanceof ApiError) {
      message.textContent = `${err.code}: ${err.message}`;
      box.appendChild(message);
      if (err.position !== null && this.state.graph.trim() !== "") {
        const caret = document.createElement("pre");
        caret.className = "error-caret";
        caret.textContent = errorCaret(this.state.graph, err.position);
        box.appendChild(caret);
      }
    } else {
      message.textContent = err instanceof Error ? err.message : String(err);
      box.appendChild(message);
    }
  }

  private clearError(): void {
    this.els.errorBox.hidden = true;
    this.els.errorBox.innerHTML = "";
  }

  async submit(): Promise<void> {
    if (!canSubmit(this.state)) return;
    const mySeq = ++this.seq;
    try {
      const response = await searchRequest(toSearchBody(this.state));
      if (mySeq !== this.seq) return; // superseded meanwhile
      this.clearError();
      this.lastResponse = response;
      this.renderResults(response);
    } catch (err) {
      if (mySeq !== this.seq) return;
      this.showError(err);
    }
  }

  private async turnPage(step: number): Promise<void> {
    const next = this.state.page + step;
    if (next < 0 || !this.lastResponse) return;
    if (next * PAGE_LIMIT >= this.lastResponse.total) return;
    this.state.page = next;
    await this.submit();
  }

  private renderResults(response: SearchResponseWire): void {
    const { results, resultsHeading, pageInfo } = this.els;
    results.innerHTML = "";
    resultsHeading.textContent = `Results (${response.total})`;
    if (response.total === 0) {
      const empty = document.createElement("p");
      empty.className = "empty";
      empty.textContent = "No matches.";
      results.appendChild(empty);
    }
    for (const match of response.matches) {
      const card = document.createElement("div");
      card.className = "match-card";
      const link = document.createElement("a");
      link.href = `#/procedure/${encodeURIComponent(match.doc_id)}`;
      link.className = "doc-link";
      link.textContent =
        match.sentence_index >= 0
          ? `${match.doc_id} · sentence ${match.sentence_index + 1}`
          : match.doc_id;
      card.appendChild(link);
      if (match.text !== "") {
        card.appendChild(renderSentence(match));
      }
      // slot captures carry document metadata with an empty span; their
      // value never occurs in the sentence, so list it below instead
      const unanchored = Object.entries(match.captures).filter(
        ([, cap]) => match.text === "" || cap.span[0] >= cap.span[1],
      );
      if (unanchored.length > 0) {
        const meta = document.createElement("p");
        meta.className = "capture-meta";
        meta.textContent = unanchored
          .map(([name, cap]) => `${name}: ${cap.text}`)
          .join(" · ");
        card.appendChild(meta);
      }
      results.appendChild(card);
    }
    const first = response.page.offset + 1;
    const last = response.page.offset + response.matches.length;
    pageInfo.textContent =
      response.total === 0 ? "" : `${first}–${last} of ${response.total}`;
    this.els.prevButton.disabled = this.state.page === 0;
    this.els.nextButton.disabled = last >= response.total;
  }

  async aggregate(): Promise<void> {
    const capture = this.els.captureSelect.value;
    if (!capture) return;
    try {
      const table = await aggregateRequest(toAggregateBody(this.state, capture));
      this.clearError();
      this.renderAggregate(table);
    } catch (err) {
      this.showError(err);
    }
  }

  private renderAggregate(table: AggregateResponseWire): void {
    const out = this.els.aggregateOut;
    out.innerHTML = "";
    const summary = document.createElement("p");
    summary.className = "aggregate-summary";
    summary.textContent =
      `${table.distinct} answers · ${table.procedures} procedures · ` +
      `${table.total_matches} matches`;
    out.appendChild(summary);
    const list = document.createElement("table");
    list.className = "answer-table";
    for (const row of table.answers) {
      const tr = document.createElement("tr");
      const answerCell = document.createElement("td");
      const button = document.createElement("button");
      button.className = "answer";
      button.textContent = row.answer;
      button.title = "refine the query with this answer";
      button.addEventListener("click", () => {
        this.state = refineWithAnswer(this.state, table.capture, row.answer);
        this.syncForm();
        void this.submit();
      });
      answerCell.appendChild(button);
      const freqCell = document.createElement("td");
      freqCell.className = "freq";
      freqCell.textContent = String(row.frequency);
      tr.appendChild(answerCell);
      tr.appendChild(freqCell);
      list.appendChild(tr);
    }
    out.appendChild(list);
  }

  private async route(): Promise<void> {
    const hash = window.location.hash;
    const match = /^#\/procedure\/(.+)$/.exec(hash);
    if (!match) {
      this.els.procedureView.hidden = true;
      this.els.searchView.hidden = false;
      return;
    }
    const docId = decodeURIComponent(match[1]);
    this.els.searchView.hidden = true;
    const view = this.els.procedureView;
    view.hidden = false;
    view.innerHTML = "";
    const back = document.createElement("a");
    back.href = "#";
    back.className = "back-link";
    back.textContent = "← back to search";
    view.appendChild(back);
    try {
      const doc = await procedureRequest(docId);
      view.appendChild(renderProcedure(doc));
    } catch (err) {
      const notFound = document.createElement("p");
      notFound.className = "error-box";
      notFound.textContent =
        err instanceof ApiError && err.status === 404
          ? `No procedure ${docId}`
          : err instanceof Error
            ? err.message
            : String(err);
      view.appendChild(notFound);
    }
  }
}

function heading(text: string): HTMLElement {
  const el = document.createElement("h2");
  el.textContent = text;
  return el;
}
