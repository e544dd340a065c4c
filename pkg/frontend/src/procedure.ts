/**
 * Procedure detail rendering: full text with mentions colored by node
 * label plus the semantic edges listed per sentence.
 */

import type { ProcedureWire, SentenceWire } from "./api";
import { labelColor } from "./highlight";

export interface Mention {
  start: number;
  end: number;
  label: string;
}

/** Contiguous B-X (I-X)* runs; lenient about orphan I- tags. */
export function decodeMentions(bio: string[]): Mention[] {
  const mentions: Mention[] = [];
  let open: Mention | null = null;
  bio.forEach((tag, i) => {
    if (tag === "O") {
      if (open) mentions.push(open);
      open = null;
      return;
    }
    const label = tag.slice(2);
    if (tag.startsWith("I-") && open && open.label === label) {
      open.end = i + 1;
      return;
    }
    if (open) mentions.push(open);
    open = { start: i, end: i + 1, label };
  });
  if (open) mentions.push(open);
  return mentions;
}

function mentionText(sentence: SentenceWire, mention: Mention): string {
  return sentence.tokens.slice(mention.start, mention.end).join(" ");
}

function renderSentenceDetail(sentence: SentenceWire, index: number): HTMLElement {
  const block = document.createElement("div");
  block.className = "sentence-detail";

  const head = document.createElement("h4");
  head.textContent = `Sentence ${index + 1}`;
  block.appendChild(head);

  const text = document.createElement("p");
  text.className = "sentence";
  const mentions = decodeMentions(sentence.bio);
  const coverage = new Map<number, Mention>();
  for (const mention of mentions) {
    for (let i = mention.start; i < mention.end; i++) coverage.set(i, mention);
  }
  sentence.tokens.forEach((token, i) => {
    if (i > 0) text.appendChild(document.createTextNode(" "));
    const mention = coverage.get(i);
    const el = document.createElement("span");
    el.textContent = token;
    if (mention) {
      el.className = "mention";
      el.style.backgroundColor = labelColor(mention.label);
      el.title = mention.label;
      el.dataset.label = mention.label;
    }
    text.appendChild(el);
  });
  block.appendChild(text);

  if (sentence.edges.length > 0) {
    const list = document.createElement("ul");
    list.className = "edge-list";
    for (const edge of sentence.edges) {
      const item = document.createElement("li");
      const head_ = mentions[edge.head];
      const tail = mentions[edge.tail];
      const headText = head_ ? mentionText(sentence, head_) : `#${edge.head}`;
      const tailText = tail ? mentionText(sentence, tail) : `#${edge.tail}`;
      item.textContent = `${edge.label}: ${headText} → ${tailText}`;
      list.appendChild(item);
    }
    block.appendChild(list);
  }
  return block;
}

export function renderProcedure(doc: ProcedureWire): HTMLElement {
  const root = document.createElement("article");
  root.className = "procedure";

  const title = document.createElement("h2");
  title.textContent = doc.id;
  root.appendChild(title);

  const meta = document.createElement("p");
  meta.className = "procedure-meta";
  meta.textContent = `source ${doc.source} · patent ${doc.patent_id}`;
  root.appendChild(meta);

  const slotNames = Object.keys(doc.slots).filter(
    (name) => doc.slots[name].length > 0,
  );
  if (slotNames.length > 0) {
    const table = document.createElement("dl");
    table.className = "slot-table";
    for (const name of slotNames) {
      const dt = document.createElement("dt");
      dt.textContent = name;
      const dd = document.createElement("dd");
      dd.textContent = doc.slots[name].join("; ");
      table.appendChild(dt);
      table.appendChild(dd);
    }
    root.appendChild(table);
  }

  doc.sentences.forEach((sentence, i) => {
    root.appendChild(renderSentenceDetail(sentence, i));
  });
  return root;
}
