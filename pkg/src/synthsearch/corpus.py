"""Data model for annotated procedures.

A procedure is a sequence of sentences. Each sentence carries tokens with
BIO entity tags, the mention spans decoded from those tags, and labeled
directed edges between mentions (the sentence's action graph). On top of the
sentences, a procedure carries protocol-level slots (reagent, solvent, ...)
as plain string lists.

All types are immutable after construction and safe to share across threads.
Validation never raises for bad annotation data: :func:`validate_document`
returns violations as values so ingestion can report every problem with
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from synthsearch.errors import MalformedBioError, UnknownLabelError

SOURCES = ("US", "EP", "OTHER")

OUTGOING = "outgoing"
INCOMING = "incoming"

# Default label inventory. The attested core is: node labels Action, Reagent,
# Amount, Equipment, pH, Generic-Measure; edge labels acts-on, using, setting,
# measure; plus the ten protocol slots. The remaining node/edge labels fill
# the inventory out to the upstream wet-lab annotation scheme's size (24
# node types, 17 edge types); deployments with a different tag set supply
# their own Schema.
DEFAULT_NODE_LABELS = (
    "Action",
    "Amount",
    "Concentration",
    "Device",
    "Equipment",
    "Generic-Measure",
    "Location",
    "Measure-Type",
    "Mention",
    "Method",
    "Misc",
    "Modifier",
    "Numerical",
    "Pressure",
    "Rate",
    "Reagent",
    "Seal",
    "Size",
    "Speed",
    "Temperature",
    "Time",
    "Unit",
    "Yield",
    "pH",
)

DEFAULT_EDGE_LABELS = (
    "acts-on",
    "co-ref-of",
    "count",
    "creates",
    "located-at",
    "measure",
    "measure-type-link",
    "meronym",
    "mod-link",
    "of-type",
    "or",
    "order",
    "part-of",
    "setting",
    "site",
    "succ",
    "using",
)

DEFAULT_SLOT_NAMES = (
    "reagent",
    "solvent",
    "product",
    "starting_material",
    "yield_percent",
    "yield_other",
    "reaction_time",
    "temperature",
    "example_label",
    "other_compound",
)


@dataclass(frozen=True)
class Schema:
    """Label inventory a corpus is validated and queried against.

    Labels are case-sensitive and may not contain whitespace; queries and
    documents referencing labels outside the schema are rejected.
    """

    node_labels: frozenset[str]
    edge_labels: frozenset[str]
    slot_names: frozenset[str]
    version: str = "1"

    def __post_init__(self):
        for kind, labels in (
            ("node", self.node_labels),
            ("edge", self.edge_labels),
            ("slot", self.slot_names),
        ):
            if not labels:
                raise ValueError(f"schema {kind} labels must be non-empty")
            for label in labels:
                if not label or any(c.isspace() for c in label):
                    raise ValueError(
                        f"bad {kind} label {label!r}: empty or contains whitespace"
                    )

    def to_json(self) -> dict:
        return {
            "schema_version": self.version,
            "node_labels": sorted(self.node_labels),
            "edge_labels": sorted(self.edge_labels),
            "slot_names": sorted(self.slot_names),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Schema":
        return cls(
            node_labels=frozenset(obj["node_labels"]),
            edge_labels=frozenset(obj["edge_labels"]),
            slot_names=frozenset(obj["slot_names"]),
            version=str(obj.get("schema_version", "1")),
        )


def default_schema() -> Schema:
    return Schema(
        node_labels=frozenset(DEFAULT_NODE_LABELS),
        edge_labels=frozenset(DEFAULT_EDGE_LABELS),
        slot_names=frozenset(DEFAULT_SLOT_NAMES),
        version="default-1",
    )


@dataclass(frozen=True, slots=True)
class Token:
    """One surface token with its BIO entity tag ("O", "B-X" or "I-X")."""

    word: str
    entity_bio: str = "O"


@dataclass(frozen=True, slots=True)
class Mention:
    """A contiguous entity span; ``anchor`` (== start) is the token a graph
    edge attaches to."""

    start: int
    end: int
    label: str

    @property
    def anchor(self) -> int:
        return self.start


@dataclass(frozen=True, slots=True)
class SemanticEdge:
    """Directed labeled edge between two mentions, by mention index."""

    head: int
    tail: int
    label: str


@dataclass(frozen=True, slots=True)
class Violation:
    """One invariant violation, with coordinates into the document."""

    code: str
    message: str
    sentence: int | None = None
    token: int | None = None

    def __str__(self):
        where = []
        if self.sentence is not None:
            where.append(f"sentence {self.sentence}")
        if self.token is not None:
            where.append(f"token {self.token}")
        loc = f" ({', '.join(where)})" if where else ""
        return f"{self.code}: {self.message}{loc}"


def decode_mentions(tokens: list[Token]) -> list[Mention]:
    """Decode BIO tags into maximal mention spans.

    Strict: raises :class:`MalformedBioError` for tags that are not
    "O"/"B-x"/"I-x" or for an "I-x" that does not continue a "B-x"/"I-x"
    of the same label.
    """
    mentions: list[Mention] = []
    open_start = -1
    open_label = ""

    def close(end: int):
        nonlocal open_start
        if open_start >= 0:
            mentions.append(Mention(open_start, end, open_label))
            open_start = -1

    for i, tok in enumerate(tokens):
        tag = tok.entity_bio
        if tag == "O":
            close(i)
        elif tag.startswith("B-") and len(tag) > 2:
            close(i)
            open_start, open_label = i, tag[2:]
        elif tag.startswith("I-") and len(tag) > 2:
            if open_start < 0:
                raise MalformedBioError("I- without preceding B-", i)
            if tag[2:] != open_label:
                raise MalformedBioError(
                    f"I-{tag[2:]} continues a {open_label} span", i
                )
        else:
            raise MalformedBioError(f"bad BIO tag {tag!r}", i)
    close(len(tokens))
    return mentions


def _lenient_spans(tags: list[str]) -> list[Mention]:
    """Best-effort span decode for possibly malformed tags.

    An orphan "I-x" opens a span as if it were "B-x"; unparseable tags act
    like "O". validate_document reports the underlying problems; this only
    exists so malformed documents are still representable.
    """
    mentions: list[Mention] = []
    open_start = -1
    open_label = ""
    for i, tag in enumerate(tags):
        prefix, _, label = tag.partition("-")
        if prefix == "B" and label:
            if open_start >= 0:
                mentions.append(Mention(open_start, i, open_label))
            open_start, open_label = i, label
        elif prefix == "I" and label:
            if open_start >= 0 and label == open_label:
                continue
            if open_start >= 0:
                mentions.append(Mention(open_start, i, open_label))
            open_start, open_label = i, label
        else:
            if open_start >= 0:
                mentions.append(Mention(open_start, i, open_label))
                open_start = -1
    if open_start >= 0:
        mentions.append(Mention(open_start, len(tags), open_label))
    return mentions


@dataclass(frozen=True, slots=True)
class SentenceGraph:
    """Tokens plus the decoded mentions and the action-graph edges."""

    tokens: tuple[Token, ...]
    mentions: tuple[Mention, ...]
    edges: tuple[SemanticEdge, ...]

    @classmethod
    def from_bio(
        cls,
        words: list[str],
        tags: list[str],
        edges: list[SemanticEdge] = (),
    ) -> "SentenceGraph":
        """Build a sentence, deriving mentions leniently from the tags.

        Edge mention indices refer to the decoded mention order. Invariant
        problems (malformed BIO, unknown labels, bad indices) are reported
        by validate_document, not here.
        """
        if len(words) != len(tags):
            raise ValueError("words and tags must have equal length")
        tokens = tuple(Token(w, t) for w, t in zip(words, tags))
        return cls(tokens, tuple(_lenient_spans(list(tags))), tuple(edges))

    def text(self) -> str:
        """Detokenized sentence (single spaces; tokens kept verbatim)."""
        return " ".join(t.word for t in self.tokens)


def edge_targets(
    sentence: SentenceGraph,
    span: tuple[int, int],
    label: str,
    direction: str,
    schema: Schema | None = None,
) -> list[int]:
    """Anchors reachable from ``span`` over edges with ``label``.

    For ``outgoing``, collects edges whose head-mention anchor lies inside
    the half-open token range ``span`` and returns the tail anchors; for
    ``incoming``, the converse. Result is sorted and deduplicated. When a
    schema is given, unknown labels are rejected; callers that validated the
    label at parse time may skip the check by passing None.
    """
    if schema is not None and label not in schema.edge_labels:
        raise UnknownLabelError("edge", label, 0)
    if direction not in (OUTGOING, INCOMING):
        raise ValueError(f"bad direction {direction!r}")
    lo, hi = span
    mentions = sentence.mentions
    out: set[int] = set()
    for e in sentence.edges:
        if e.label != label:
            continue
        if e.head >= len(mentions) or e.tail >= len(mentions):
            continue
        src, dst = (e.head, e.tail) if direction == OUTGOING else (e.tail, e.head)
        if lo <= mentions[src].anchor < hi:
            out.add(mentions[dst].anchor)
    return sorted(out)


@dataclass(frozen=True, slots=True)
class ProcedureDoc:
    """One synthesis procedure: sentences plus protocol-level slots."""

    id: str
    source: str
    patent_id: str
    sentences: tuple[SentenceGraph, ...]
    slots: dict[str, list[str]] = field(default_factory=dict)


def validate_document(doc: ProcedureDoc, schema: Schema) -> list[Violation]:
    """Check every type invariant; an empty report means the document is valid.

    Corpus-level uniqueness of ids is the reader's/indexer's job; everything
    local to one document is checked here.
    """
    report: list[Violation] = []
    add = report.append

    if not doc.id:
        add(Violation("empty-id", "document id is empty"))
    if doc.source not in SOURCES:
        add(Violation("bad-source", f"source {doc.source!r} not one of {SOURCES}"))

    for si, sent in enumerate(doc.sentences):
        open_label = None
        for ti, tok in enumerate(sent.tokens):
            tag = tok.entity_bio
            if tag == "O":
                open_label = None
                continue
            prefix, _, label = tag.partition("-")
            if prefix not in ("B", "I") or not label:
                add(Violation("bio-malformed", f"bad BIO tag {tag!r}", si, ti))
                open_label = None
                continue
            if label not in schema.node_labels:
                add(Violation("unknown-node-label", f"unknown node label {label!r}", si, ti))
            if prefix == "I":
                if open_label is None:
                    add(Violation("bio-malformed", "I- without preceding B-", si, ti))
                elif label != open_label:
                    add(Violation(
                        "bio-malformed",
                        f"I-{label} continues a {open_label} span",
                        si, ti,
                    ))
            open_label = label

        expected = tuple(_lenient_spans([t.entity_bio for t in sent.tokens]))
        if sent.mentions != expected:
            add(Violation(
                "mentions-stale",
                "mention list does not match the maximal BIO spans",
                si,
            ))

        n_mentions = len(sent.mentions)
        for e in sent.edges:
            if e.label not in schema.edge_labels:
                add(Violation("unknown-edge-label", f"unknown edge label {e.label!r}", si))
            if not (0 <= e.head < n_mentions and 0 <= e.tail < n_mentions):
                add(Violation(
                    "edge-bad-index",
                    f"edge {e.label} references mention {max(e.head, e.tail)} "
                    f"of {n_mentions}",
                    si,
                ))
            elif e.head == e.tail:
                add(Violation("edge-self-loop", f"edge {e.label} is a self-loop", si))

    for slot, values in doc.slots.items():
        if slot not in schema.slot_names:
            add(Violation("unknown-slot", f"unknown slot name {slot!r}"))
        for v in values:
            if v == "":
                add(Violation("empty-slot-value", f"slot {slot!r} has an empty value"))

    return report
