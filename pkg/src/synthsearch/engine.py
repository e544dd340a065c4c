"""Two-step query execution, the brute-force oracle, and aggregation.

Matching semantics (shared by the compiled matcher and the oracle):

- A match attempt starts at every token position. Literals and bracket
  constraints consume consecutive tokens; a bare literal compares
  case-insensitively, [word=...] exactly, [entity=...] by tag equality.
- A traversal consumes nothing: it collects edge endpoints whose anchor
  (mention first token) lies inside the whole span matched so far, and
  continues once per opposite-endpoint anchor; the next element must match
  starting exactly at the landing token. The landing token joins the span.
- The match span is the covering token range of everything consumed or
  landed on; a capture records the covering range of its group.
- Quantifier repetition counts inside a capture group are greedy: only the
  largest count that lets the rest of the query succeed is kept (so
  "[entity=B-Reagent] [entity=I-Reagent]*" captures whole mentions, not
  every prefix). Counts outside captures and traversal targets are fully
  enumerated, then matches are deduplicated on (sentence, capture map) --
  gap variations that bind the same captures collapse to the first match in
  sort order. Matches sort by (sentence id, span start, capture map, span
  end).

The brute-force oracle implements the same semantics by direct
interpretation of the query AST over every sentence, with no index and no
compilation; `search` must agree with it exactly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from synthsearch.corpus import ProcedureDoc, SentenceGraph, edge_targets
from synthsearch.errors import UnknownCaptureError
from synthsearch.index import (
    IndexHandle,
    SentenceLocator,
    slot_filter_matches,
)
from synthsearch.queryir import (
    AnyValue,
    Capture,
    Constraint,
    GraphQuery,
    Literal,
    Quant,
    SlotQuery,
    TokenConstraint,
    Traversal,
    required_terms,
)
from synthsearch.rng import SplitMix64


@dataclass(frozen=True, slots=True)
class CaptureSpan:
    """Half-open token range plus the covered text."""

    start: int
    end: int
    text: str


@dataclass(frozen=True)
class Match:
    locator: SentenceLocator
    span: tuple[int, int]
    captures: dict[str, CaptureSpan]


@dataclass
class Page:
    offset: int = 0
    limit: int | None = None

    def __post_init__(self) -> None:
        if self.offset < 0 or (self.limit is not None and self.limit < 0):
            raise ValueError("page out of range")


@dataclass
class SearchResponse:
    matches: list[Match]
    total: int
    offset: int = 0
    limit: int | None = None


@dataclass(frozen=True)
class AnswerTable:
    """Distinct normalized answers for one capture, most frequent first."""

    capture: str
    answers: tuple[tuple[str, int], ...]
    procedures: int

    @property
    def distinct(self) -> int:
        return len(self.answers)

    @property
    def total_matches(self) -> int:
        return sum(freq for _, freq in self.answers)


# --- compiled matcher -------------------------------------------------


@dataclass(frozen=True, slots=True)
class MatchToken:
    constraint: TokenConstraint
    quant: Quant
    greedy: bool


@dataclass(frozen=True, slots=True)
class JumpGraph:
    direction: str
    label: str


@dataclass(frozen=True, slots=True)
class BeginCapture:
    name: str


@dataclass(frozen=True, slots=True)
class EndCapture:
    name: str


Instruction = MatchToken | JumpGraph | BeginCapture | EndCapture
MatchProgram = tuple[Instruction, ...]

_QUANT_ONE = Quant(1, 1)


def compile_query(q: GraphQuery) -> MatchProgram:
    """Flatten the AST into instructions; length is linear in AST size."""
    program: list[Instruction] = []

    def emit(elems, inside_capture: bool) -> None:
        for elem in elems:
            if isinstance(elem, Literal):
                tc = TokenConstraint((("word_lc", elem.word.lower()),))
                program.append(MatchToken(tc, _QUANT_ONE, inside_capture))
            elif isinstance(elem, Constraint):
                program.append(
                    MatchToken(elem.constraint, elem.quant, inside_capture)
                )
            elif isinstance(elem, Traversal):
                program.append(JumpGraph(elem.direction, elem.label))
            elif isinstance(elem, Capture):
                program.append(BeginCapture(elem.name))
                emit(elem.elems, True)
                program.append(EndCapture(elem.name))
            else:
                raise TypeError(f"unexpected element {elem!r}")

    emit(q.elems, False)
    return tuple(program)


def _satisfies(tc: TokenConstraint, token) -> bool:
    if tc.wildcard:
        return True
    for attr, value in tc.alternatives:
        if attr == "word":
            if token.word == value:
                return True
        elif attr == "word_lc":
            if token.word.lower() == value:
                return True
        elif token.entity_bio == value:
            return True
    return False


def _cover_groups(groups, lo: int, hi: int):
    return tuple(
        (name, lo if glo is None else min(glo, lo), hi if ghi is None else max(ghi, hi))
        for name, glo, ghi in groups
    )


def match_sentence(
    program: MatchProgram, sentence: SentenceGraph, locator: SentenceLocator
) -> list[Match]:
    """Run the compiled program; returns deduplicated, sorted matches."""
    tokens = sentence.tokens
    n = len(tokens)
    raw: list[Match] = []

    def run(ip, pos, lo, hi, groups, caps) -> int:
        if ip == len(program):
            span = (pos, pos) if lo is None else (lo, hi + 1)
            raw.append(Match(locator, span, dict(caps)))
            return 1
        ins = program[ip]
        if isinstance(ins, MatchToken):
            limit = n - pos if ins.quant.n is None else min(ins.quant.n, n - pos)
            run_len = 0
            while run_len < limit and _satisfies(ins.constraint, tokens[pos + run_len]):
                run_len += 1
            if run_len < ins.quant.m:
                return 0
            counts = (
                range(run_len, ins.quant.m - 1, -1)
                if ins.greedy
                else range(ins.quant.m, run_len + 1)
            )
            emitted = 0
            for k in counts:
                if k == 0:
                    produced = run(ip + 1, pos, lo, hi, groups, caps)
                else:
                    last = pos + k - 1
                    produced = run(
                        ip + 1,
                        pos + k,
                        pos if lo is None else min(lo, pos),
                        last if hi is None else max(hi, last),
                        _cover_groups(groups, pos, last),
                        caps,
                    )
                emitted += produced
                if ins.greedy and produced:
                    break
            return emitted
        if isinstance(ins, JumpGraph):
            if lo is None:
                return 0
            emitted = 0
            for t in edge_targets(sentence, (lo, hi + 1), ins.label, ins.direction):
                emitted += run(
                    ip + 1,
                    t,
                    min(lo, t),
                    max(hi, t),
                    _cover_groups(groups, t, t),
                    caps,
                )
            return emitted
        if isinstance(ins, BeginCapture):
            return run(
                ip + 1, pos, lo, hi, groups + ((ins.name, None, None),), caps
            )
        # EndCapture
        name, glo, ghi = groups[-1]
        crange = (pos, pos) if glo is None else (glo, ghi + 1)
        text = " ".join(t.word for t in tokens[crange[0] : crange[1]])
        return run(
            ip + 1,
            pos,
            lo,
            hi,
            groups[:-1],
            caps + ((name, CaptureSpan(crange[0], crange[1], text)),),
        )

    for start in range(n):
        run(0, start, None, None, (), ())
    return _dedup_sorted(raw)


def _captures_key(captures: dict[str, CaptureSpan]):
    return tuple(
        (name, c.start, c.end, c.text) for name, c in sorted(captures.items())
    )


def _dedup_sorted(matches: list[Match]) -> list[Match]:
    ordered = sorted(
        matches,
        key=lambda m: (
            m.locator.sentence_id,
            m.span[0],
            _captures_key(m.captures),
            m.span[1],
        ),
    )
    seen = set()
    kept = []
    for m in ordered:
        key = (m.locator.sentence_id, _captures_key(m.captures))
        if key not in seen:
            seen.add(key)
            kept.append(m)
    return kept


# --- indexed search ----------------------------------------------------


def _slot_captures(sq: SlotQuery, slots: dict[str, list[str]]):
    captures = {}
    for name in sorted(sq.filters):
        hits = slot_filter_matches(sq.filters[name], slots.get(name, ()))
        captures[name] = CaptureSpan(0, 0, hits[0])
    return captures


def search(
    h: IndexHandle,
    gq: GraphQuery | None = None,
    sq: SlotQuery | None = None,
    page: Page | None = None,
) -> SearchResponse:
    """Two-step indexed search; exact contract shared with the oracle.

    Graph queries prune candidate sentences through the inverted index and
    verify each candidate with the compiled matcher. Slot queries filter at
    document level; a slot-only search reports one match per document (its
    first sentence, empty span) whose captures carry the first matching
    value per filtered slot. When both are given, the slot filter restricts
    which documents' sentences are verified and captures come from the
    graph query alone.
    """
    if gq is None and sq is None:
        raise ValueError("at least one of graph query or slot query is required")
    page = page if page is not None else Page()

    if gq is None:
        allowed = h.filter_docs_by_slots(sq)
        matches = []
        for doc_id in h.doc_ids():
            if doc_id not in allowed:
                continue
            meta = h.doc_meta(doc_id)
            locator = (
                SentenceLocator(meta.first_sentence_id, doc_id, 0)
                if meta.n_sentences
                else SentenceLocator(-1, doc_id, -1)
            )
            matches.append(Match(locator, (0, 0), _slot_captures(sq, meta.slots)))
    else:
        terms = required_terms(gq)
        if not terms:
            raise ValueError("graph query has no required terms")
        candidates = h.candidate_sentences(terms)
        if sq is not None:
            allowed = h.filter_docs_by_slots(sq)
            candidates = [
                sid for sid in candidates if h.locator(sid).doc_id in allowed
            ]
        program = compile_query(gq)
        matches = []
        for sid in candidates:
            matches.extend(
                match_sentence(program, h.sentence(sid), h.locator(sid))
            )
        matches = _dedup_sorted(matches)

    total = len(matches)
    end = None if page.limit is None else page.offset + page.limit
    return SearchResponse(matches[page.offset : end], total, page.offset, page.limit)


# --- brute-force oracle -------------------------------------------------


def _oracle_token_ok(tc: TokenConstraint, token) -> bool:
    if tc.wildcard:
        return True
    return any(
        (attr == "word" and token.word == value)
        or (attr == "word_lc" and token.word.lower() == value)
        or (attr == "entity" and token.entity_bio == value)
        for attr, value in tc.alternatives
    )


def _oracle_match_sentence(
    q: GraphQuery, sentence: SentenceGraph, locator: SentenceLocator
) -> list[Match]:
    """AST-walking reference matcher (continuation-passing, no compile)."""
    tokens = sentence.tokens
    n = len(tokens)
    found: list[Match] = []

    def capture_text(lo: int, hi: int) -> str:
        return " ".join(t.word for t in tokens[lo:hi])

    def seq(elems, idx, in_cap, pos, lo, hi, groups, caps, cont) -> int:
        if idx == len(elems):
            return cont(pos, lo, hi, groups, caps)
        elem = elems[idx]
        after = lambda p, l, h, g, c: seq(elems, idx + 1, in_cap, p, l, h, g, c, cont)

        if isinstance(elem, Literal):
            if pos < n and tokens[pos].word.lower() == elem.word.lower():
                return after(
                    pos + 1,
                    pos if lo is None else min(lo, pos),
                    pos if hi is None else max(hi, pos),
                    _cover_groups(groups, pos, pos),
                    caps,
                )
            return 0

        if isinstance(elem, Constraint):
            cap = n - pos if elem.quant.n is None else min(elem.quant.n, n - pos)
            length = 0
            while length < cap and _oracle_token_ok(elem.constraint, tokens[pos + length]):
                length += 1
            if length < elem.quant.m:
                return 0
            if in_cap:
                counts = range(length, elem.quant.m - 1, -1)
            else:
                counts = range(elem.quant.m, length + 1)
            emitted = 0
            for k in counts:
                if k == 0:
                    produced = after(pos, lo, hi, groups, caps)
                else:
                    produced = after(
                        pos + k,
                        pos if lo is None else min(lo, pos),
                        pos + k - 1 if hi is None else max(hi, pos + k - 1),
                        _cover_groups(groups, pos, pos + k - 1),
                        caps,
                    )
                emitted += produced
                if in_cap and produced:
                    break
            return emitted

        if isinstance(elem, Traversal):
            if lo is None:
                return 0
            emitted = 0
            for t in edge_targets(sentence, (lo, hi + 1), elem.label, elem.direction):
                emitted += after(
                    t, min(lo, t), max(hi, t), _cover_groups(groups, t, t), caps
                )
            return emitted

        # Capture: run the subpattern with a fresh group accumulator, then
        # record its covering range and resume the enclosing sequence.
        def close_group(p, l, h, g, c) -> int:
            name, glo, ghi = g[-1]
            crange = (p, p) if glo is None else (glo, ghi + 1)
            span = CaptureSpan(crange[0], crange[1], capture_text(*crange))
            return seq(
                elems, idx + 1, in_cap, p, l, h, g[:-1], c + ((name, span),), cont
            )

        return seq(
            elem.elems,
            0,
            True,
            pos,
            lo,
            hi,
            groups + ((elem.name, None, None),),
            caps,
            close_group,
        )

    def finish(pos, lo, hi, groups, caps) -> int:
        span = (pos, pos) if lo is None else (lo, hi + 1)
        found.append(Match(locator, span, dict(caps)))
        return 1

    for start in range(n):
        seq(q.elems, 0, False, start, None, None, (), (), finish)
    return found


def _oracle_slot_hit(flt, values: list[str]) -> bool:
    if not values:
        return False
    if isinstance(flt, AnyValue):
        return True
    return any(k.lower() in v.lower() for v in values for k in flt.values)


def _oracle_doc_passes(sq: SlotQuery, doc: ProcedureDoc) -> bool:
    return all(
        _oracle_slot_hit(flt, doc.slots.get(name, []))
        for name, flt in sq.filters.items()
    )


def _sentence_has_term(sentence: SentenceGraph, term: tuple[str, str]) -> bool:
    attr, value = term
    if attr == "word":
        return any(t.word == value for t in sentence.tokens)
    if attr == "word_lc":
        return any(t.word.lower() == value for t in sentence.tokens)
    return any(t.entity_bio == value for t in sentence.tokens)


def brute_force_search(
    corpus: Sequence[ProcedureDoc],
    gq: GraphQuery | None = None,
    sq: SlotQuery | None = None,
    page: Page | None = None,
    prefilter: bool = False,
) -> SearchResponse:
    """Index-free reference search; must equal `search` on any corpus.

    ``prefilter`` skips sentences missing a required term (found by direct
    token scan). It reuses required_terms, so leave it off when the point
    of the run is to test phase-1 soundness itself.
    """
    if gq is None and sq is None:
        raise ValueError("at least one of graph query or slot query is required")
    page = page if page is not None else Page()

    matches: list[Match] = []
    if gq is None:
        sentence_id = 0
        for doc in corpus:
            if _oracle_doc_passes(sq, doc):
                locator = (
                    SentenceLocator(sentence_id, doc.id, 0)
                    if doc.sentences
                    else SentenceLocator(-1, doc.id, -1)
                )
                captures = {}
                for name in sorted(sq.filters):
                    values = doc.slots.get(name, [])
                    if isinstance(sq.filters[name], AnyValue):
                        hits = list(values)
                    else:
                        keys = sq.filters[name].values
                        hits = [
                            v
                            for v in values
                            if any(k.lower() in v.lower() for k in keys)
                        ]
                    captures[name] = CaptureSpan(0, 0, hits[0])
                matches.append(Match(locator, (0, 0), captures))
            sentence_id += len(doc.sentences)
    else:
        terms = required_terms(gq)
        if not terms:
            raise ValueError("graph query has no required terms")
        sentence_id = 0
        for doc in corpus:
            doc_ok = sq is None or _oracle_doc_passes(sq, doc)
            for sentence_index, sentence in enumerate(doc.sentences):
                sid = sentence_id + sentence_index
                if not doc_ok:
                    continue
                if prefilter and not all(
                    _sentence_has_term(sentence, t) for t in terms
                ):
                    continue
                locator = SentenceLocator(sid, doc.id, sentence_index)
                matches.extend(_oracle_match_sentence(gq, sentence, locator))
            sentence_id += len(doc.sentences)
        matches = _oracle_dedup(matches)

    total = len(matches)
    end = None if page.limit is None else page.offset + page.limit
    return SearchResponse(matches[page.offset : end], total, page.offset, page.limit)


def _oracle_dedup(matches: list[Match]) -> list[Match]:
    def caps_key(m: Match):
        return tuple(
            (name, c.start, c.end, c.text)
            for name, c in sorted(m.captures.items())
        )

    ordered = sorted(
        matches,
        key=lambda m: (m.locator.sentence_id, m.span[0], caps_key(m), m.span[1]),
    )
    kept = []
    seen = set()
    for m in ordered:
        key = (m.locator.sentence_id, caps_key(m))
        if key not in seen:
            seen.add(key)
            kept.append(m)
    return kept


# --- aggregation and sampling -------------------------------------------


def normalize_answer(text: str) -> str:
    """Trim, collapse internal whitespace, lowercase."""
    return " ".join(text.split()).lower()


def aggregate_answers(
    resp: SearchResponse,
    capture: str,
    valid_captures: set[str] | None = None,
) -> AnswerTable:
    """Distinct-answer table for one capture over the response's matches.

    Frequencies sum to the number of matches carrying the capture;
    ``procedures`` counts distinct contributing documents. Pass the query's
    capture names as ``valid_captures`` to reject typos explicitly.
    """
    if valid_captures is not None and capture not in valid_captures:
        raise UnknownCaptureError(capture, sorted(valid_captures))
    counts: Counter[str] = Counter()
    docs: set[str] = set()
    for m in resp.matches:
        got = m.captures.get(capture)
        if got is None:
            continue
        counts[normalize_answer(got.text)] += 1
        docs.add(m.locator.doc_id)
    answers = tuple(
        sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    )
    return AnswerTable(capture=capture, answers=answers, procedures=len(docs))


def sample_for_review(table: AnswerTable, k: int, seed: int) -> list[str]:
    """Uniform sample (no replacement) of distinct answers; deterministic.

    Returns all answers when there are at most ``k``; order follows the
    table either way.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    answers = [answer for answer, _ in table.answers]
    if len(answers) <= k:
        return answers
    rng = SplitMix64(seed)
    return [answers[i] for i in rng.sample_indices(len(answers), k)]
