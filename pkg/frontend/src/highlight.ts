/**
 * Capture highlighting over matched sentences.
 *
 * The server detokenizes sentences by joining tokens with single spaces,
 * and capture spans are token index ranges into that tokenization. The
 * renderer recovers the token array with the exact inverse (split on a
 * single space) and marks whole tokens; it never searches the text for
 * capture strings, so rendered highlights always equal the API spans.
 */

import type { MatchWire } from "./api";

/** Inverse of the server's single-space detokenization. */
export function tokensOf(text: string): string[] {
  if (text === "") return [];
  return text.split(" ");
}

export interface TokenMark {
  token: string;
  /** Capture names covering this token, in capture-name order. */
  captures: string[];
  /** Capture names whose span starts at this token (label anchors). */
  starts: string[];
}

/** Per-token capture coverage for a match. Empty spans anchor nothing. */
export function markTokens(match: MatchWire): TokenMark[] {
  const tokens = tokensOf(match.text);
  const names = Object.keys(match.captures).sort();
  return tokens.map((token, i) => {
    const covering = names.filter((name) => {
      const [start, end] = match.captures[name].span;
      return start <= i && i < end;
    });
    const starting = names.filter((name) => {
      const [start, end] = match.captures[name].span;
      return start === i && start < end;
    });
    return { token, captures: covering, starts: starting };
  });
}

/** Render one match's sentence with captures wrapped in labeled <mark>s. */
export function renderSentence(match: MatchWire): HTMLElement {
  const root = document.createElement("p");
  root.className = "sentence";
  const marks = markTokens(match);
  marks.forEach((mark, i) => {
    if (i > 0) root.appendChild(document.createTextNode(" "));
    for (const name of mark.starts) {
      const label = document.createElement("span");
      label.className = "capture-label";
      label.textContent = name;
      root.appendChild(label);
    }
    if (mark.captures.length > 0) {
      const el = document.createElement("mark");
      el.dataset.capture = mark.captures.join(",");
      el.textContent = mark.token;
      root.appendChild(el);
    } else {
      const el = document.createElement("span");
      el.className = "tok";
      el.textContent = mark.token;
      root.appendChild(el);
    }
  });
  return root;
}

/** Stable color for an entity label, for the procedure detail view. */
export function labelColor(label: string): string {
  let hash = 0;
  for (let i = 0; i < label.length; i++) {
    hash = (hash * 31 + label.charCodeAt(i)) >>> 0;
  }
  return `hsl(${hash % 360}, 65%, 82%)`;
}
