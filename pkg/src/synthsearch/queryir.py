"""Query ASTs and parsers for the two search modalities.

Graph query grammar (EBNF)::

    query      := elem+
    elem       := literal | bracket quant? | capture | traversal
    bracket    := "[" ( constraint ("|" constraint)* )? "]"
    constraint := ("word" | "entity") "=" value
    quant      := "*" | "+" | "{" m "," n "}"
    capture    := "(?<" name ">" elem+ ")"
    traversal  := (">" | "<") label

Bare words are Literals; adjacent bare words form consecutive Literals
("PTFE filter" is two elements). "[]" is a wildcard matching any token.
Quantifiers bind only to the immediately preceding bracket; literals and
traversals are never quantified. ">label" follows an edge head-to-tail,
"<label" tail-to-head. Entity values are full BIO tags ("B-Reagent") or "O";
labels are checked against the schema, as are traversal labels.

Case policy: bare Literals match case-insensitively; [word=...] matches
case-sensitively; [entity=...] is exact tag equality.

Error positions are 0-based character offsets into the query string.

Slot queries are flat string-to-string maps: the value "?" matches any
non-empty slot, anything else splits on the exact token " OR "
(case-sensitive) into keyword alternatives, each matched as a
case-insensitive substring of the slot's values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from synthsearch.corpus import INCOMING, OUTGOING, Schema
from synthsearch.errors import QueryParseError, UnknownLabelError, UnknownSlotError

_WORD_BREAK = set(" \t\r\n[](){}<>|=*+")
_VALUE_BREAK = set(" \t\r\n|]")


@dataclass(frozen=True, slots=True)
class Quant:
    """Repetition bounds; n=None means unbounded."""

    m: int
    n: int | None

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError("quantifier lower bound must be >= 0")
        if self.n is not None and self.n < self.m:
            raise ValueError("quantifier upper bound below lower bound")


ONE = Quant(1, 1)
STAR = Quant(0, None)
PLUS = Quant(1, None)


@dataclass(frozen=True, slots=True)
class TokenConstraint:
    """Disjunction of (attribute, value) tests, or a wildcard."""

    alternatives: tuple[tuple[str, str], ...]
    wildcard: bool = False

    def __post_init__(self) -> None:
        if self.wildcard and self.alternatives:
            raise ValueError("wildcard constraint cannot carry alternatives")
        if not self.wildcard and not self.alternatives:
            raise ValueError("non-wildcard constraint needs alternatives")


@dataclass(frozen=True, slots=True)
class Literal:
    word: str


@dataclass(frozen=True, slots=True)
class Constraint:
    constraint: TokenConstraint
    quant: Quant = ONE


@dataclass(frozen=True, slots=True)
class Capture:
    name: str
    elems: tuple[PatternElem, ...]


@dataclass(frozen=True, slots=True)
class Traversal:
    direction: str  # OUTGOING or INCOMING
    label: str


PatternElem = Literal | Constraint | Capture | Traversal

WILDCARD = TokenConstraint(alternatives=(), wildcard=True)


@dataclass(frozen=True, slots=True)
class GraphQuery:
    elems: tuple[PatternElem, ...]


@dataclass(frozen=True, slots=True)
class AnyValue:
    """Slot filter satisfied by any non-empty slot."""


@dataclass(frozen=True, slots=True)
class Keywords:
    """Slot filter satisfied when any keyword substring-matches a value."""

    values: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("keyword list must be non-empty")
        if any(v == "" for v in self.values):
            raise ValueError("empty keyword")


SlotFilter = AnyValue | Keywords

ANY_VALUE = AnyValue()


@dataclass(frozen=True)
class SlotQuery:
    filters: dict[str, SlotFilter] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.filters:
            raise ValueError("slot query must carry at least one filter")


class _Parser:
    """Recursive-descent parser over the raw query string."""

    def __init__(self, text: str, schema: Schema) -> None:
        self.text = text
        self.schema = schema
        self.pos = 0
        self.first_elem_pos = 0
        self.capture_names: set[str] = set()

    def error(self, message: str, expected: str | None = None) -> QueryParseError:
        return QueryParseError(message, self.pos, expected)

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while not self.at_end() and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}", expected=ch)
        self.pos += 1

    def read_while(self, ok) -> str:
        start = self.pos
        while not self.at_end() and ok(self.text[self.pos]):
            self.pos += 1
        return self.text[start : self.pos]

    def parse_query(self) -> GraphQuery:
        elems = self.parse_elems(top_level=True)
        if not elems:
            raise QueryParseError("empty query", 0)
        if isinstance(elems[0], Traversal):
            raise QueryParseError(
                "query must not begin with a traversal", self.first_elem_pos
            )
        query = GraphQuery(tuple(elems))
        if not required_terms(query):
            raise QueryParseError(
                "query has no required term; add a literal or a "
                "single-alternative [word=...]/[entity=...] constraint",
                0,
            )
        return query

    def parse_elems(self, top_level: bool) -> list[PatternElem]:
        elems: list[PatternElem] = []
        while True:
            self.skip_ws()
            if self.at_end():
                if not top_level:
                    raise self.error("unterminated capture group", expected=")")
                return elems
            ch = self.peek()
            if ch == ")":
                if top_level:
                    raise self.error("unexpected ')'")
                return elems
            if top_level and not elems:
                self.first_elem_pos = self.pos
            elems.append(self.parse_elem())

    def parse_elem(self) -> PatternElem:
        ch = self.peek()
        if ch == "[":
            return self.parse_bracket()
        if ch == "(":
            return self.parse_capture()
        if ch in "<>":
            return self.parse_traversal()
        if ch in "*+{":
            raise self.error("quantifier must follow a [...] constraint")
        if ch in "]|=}":
            raise self.error(f"unexpected {ch!r}")
        word = self.read_while(lambda c: c not in _WORD_BREAK)
        if not word:
            raise self.error(f"unexpected {ch!r}")
        return Literal(word)

    def parse_bracket(self) -> Constraint:
        self.expect("[")
        self.skip_ws()
        if self.peek() == "]":
            self.pos += 1
            return Constraint(WILDCARD, self.parse_quant())
        alternatives = [self.parse_alternative()]
        self.skip_ws()
        while self.peek() == "|":
            self.pos += 1
            self.skip_ws()
            alternatives.append(self.parse_alternative())
            self.skip_ws()
        self.expect("]")
        return Constraint(TokenConstraint(tuple(alternatives)), self.parse_quant())

    def parse_alternative(self) -> tuple[str, str]:
        attr_pos = self.pos
        attr = self.read_while(str.isalpha)
        if attr not in ("word", "entity"):
            self.pos = attr_pos
            raise self.error(
                f"unknown attribute {attr!r}", expected="'word' or 'entity'"
            )
        self.expect("=")
        value_pos = self.pos
        value = self.read_while(lambda c: c not in _VALUE_BREAK)
        if not value:
            raise self.error("empty constraint value")
        if attr == "entity":
            self.check_entity_value(value, value_pos)
        return attr, value

    def check_entity_value(self, value: str, pos: int) -> None:
        if value == "O":
            return
        if value[:2] not in ("B-", "I-"):
            self.pos = pos
            raise self.error("entity value must be 'O' or a 'B-'/'I-' tag")
        if value[2:] not in self.schema.node_labels:
            raise UnknownLabelError("entity", value[2:], pos)

    def parse_quant(self) -> Quant:
        ch = self.peek()
        if ch == "*":
            self.pos += 1
            return STAR
        if ch == "+":
            self.pos += 1
            return PLUS
        if ch == "{":
            brace_pos = self.pos
            self.pos += 1
            m = self.parse_int()
            self.expect(",")
            n = self.parse_int()
            if n < m:
                self.pos = brace_pos
                raise self.error(f"bad quantifier range {{{m},{n}}}")
            self.expect("}")
            return Quant(m, n)
        return ONE

    def parse_int(self) -> int:
        digits = self.read_while(str.isdigit)
        if not digits:
            raise self.error("expected a number", expected="digit")
        return int(digits)

    def parse_capture(self) -> Capture:
        if self.text[self.pos : self.pos + 3] != "(?<":
            raise self.error("expected capture group", expected="(?<")
        self.pos += 3
        name_pos = self.pos
        name = self.read_while(lambda c: c.isalnum() or c == "_")
        if not name or name[0].isdigit():
            self.pos = name_pos
            raise self.error("invalid capture name")
        self.expect(">")
        if name in self.capture_names:
            self.pos = name_pos
            raise self.error(f"duplicate capture name {name!r}")
        self.capture_names.add(name)
        elems = self.parse_elems(top_level=False)
        if not elems:
            raise self.error("empty capture group")
        self.expect(")")
        return Capture(name, tuple(elems))

    def parse_traversal(self) -> Traversal:
        direction = OUTGOING if self.peek() == ">" else INCOMING
        self.pos += 1
        label_pos = self.pos
        label = self.read_while(lambda c: c not in _WORD_BREAK)
        if not label:
            raise self.error("expected an edge label after traversal operator")
        if label not in self.schema.edge_labels:
            raise UnknownLabelError("edge", label, label_pos)
        return Traversal(direction, label)


def parse_graph_query(text: str, schema: Schema) -> GraphQuery:
    """Parse the graph query DSL; see the module docstring for the grammar.

    Raises QueryParseError (with character offset and, where helpful, an
    expected-token hint) or UnknownLabelError.
    """
    parser = _Parser(text, schema)
    query = parser.parse_query()
    return query


def render_query(q: GraphQuery) -> str:
    """Canonical string form; parse(render(q)) is structurally equal to q."""
    return " ".join(_render_elem(e) for e in q.elems)


def _render_quant(quant: Quant) -> str:
    if quant == ONE:
        return ""
    if quant == STAR:
        return "*"
    if quant == PLUS:
        return "+"
    return f"{{{quant.m},{quant.n}}}"


def _render_elem(elem: PatternElem) -> str:
    if isinstance(elem, Literal):
        return elem.word
    if isinstance(elem, Constraint):
        if elem.constraint.wildcard:
            body = "[]"
        else:
            body = "[" + "|".join(
                f"{attr}={value}" for attr, value in elem.constraint.alternatives
            ) + "]"
        return body + _render_quant(elem.quant)
    if isinstance(elem, Capture):
        inner = " ".join(_render_elem(e) for e in elem.elems)
        return f"(?<{elem.name}> {inner})"
    if isinstance(elem, Traversal):
        arrow = ">" if elem.direction == OUTGOING else "<"
        return f"{arrow}{elem.label}"
    raise TypeError(f"unexpected element {elem!r}")


def required_terms(q: GraphQuery) -> set[tuple[str, str]]:
    """Index terms that must occur in any sentence matching ``q``.

    Literals contribute ("word_lc", lowercased word) per the case policy.
    A constraint contributes only when it is guaranteed to consume a token
    (quantifier lower bound >= 1) and has exactly one alternative; "O" entity
    values contribute nothing because "O" tokens are not indexed. Wildcards,
    multi-alternative constraints, and traversals contribute nothing.
    """
    terms: set[tuple[str, str]] = set()
    _collect_terms(q.elems, terms)
    return terms


def _collect_terms(elems: tuple[PatternElem, ...], terms: set) -> None:
    for elem in elems:
        if isinstance(elem, Literal):
            terms.add(("word_lc", elem.word.lower()))
        elif isinstance(elem, Constraint):
            tc = elem.constraint
            if elem.quant.m >= 1 and not tc.wildcard and len(tc.alternatives) == 1:
                attr, value = tc.alternatives[0]
                if attr == "word":
                    terms.add(("word", value))
                elif value != "O":
                    terms.add(("entity", value))
        elif isinstance(elem, Capture):
            _collect_terms(elem.elems, terms)


def capture_names(q: GraphQuery) -> list[str]:
    """Capture names in query order (outer before inner)."""
    names: list[str] = []

    def walk(elems: tuple[PatternElem, ...]) -> None:
        for elem in elems:
            if isinstance(elem, Capture):
                names.append(elem.name)
                walk(elem.elems)

    walk(q.elems)
    return names


def parse_slot_query(obj: dict[str, str], schema: Schema) -> SlotQuery:
    """Parse a flat slot-name -> filter-string map.

    "?" means any value; otherwise the string splits on the exact separator
    " OR " into keyword alternatives (verbatim, no trimming).
    """
    filters: dict[str, SlotFilter] = {}
    for name, value in obj.items():
        if name not in schema.slot_names:
            raise UnknownSlotError(name)
        if not isinstance(value, str):
            raise ValueError(f"slot {name!r}: filter must be a string")
        if value == "?":
            filters[name] = ANY_VALUE
        else:
            parts = value.split(" OR ")
            if any(p == "" for p in parts):
                raise ValueError(f"slot {name!r}: empty keyword in {value!r}")
            filters[name] = Keywords(tuple(parts))
    return SlotQuery(filters)
