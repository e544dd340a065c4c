"""Interchange format for annotated corpora.

A corpus is a UTF-8 file with one JSON record per line:

    {"id": str, "source": "US"|"EP"|"OTHER", "patent_id": str,
     "sentences": [{"tokens": [str], "bio": [str],
                    "edges": [{"head": int, "tail": int, "label": str}]}],
     "slots": {slot_name: [str, ...]}}

Edge ``head``/``tail`` reference mention indices in BIO-decoded order. Field
names are fixed; unknown fields are rejected so producer/consumer drift
surfaces immediately. A sidecar manifest at ``<corpus>.manifest.json``
declares the schema:

    {"schema_version": str, "node_labels": [...], "edge_labels": [...],
     "slot_names": [...]}

Reading is strict and streaming: documents are yielded in file order and the
stream aborts on the first malformed record, naming its line number.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator

from synthsearch.corpus import (
    SOURCES,
    ProcedureDoc,
    Schema,
    SemanticEdge,
    SentenceGraph,
    validate_document,
)
from synthsearch.errors import CorpusReadError, DuplicateDocumentIdError

_RECORD_KEYS = {"id", "source", "patent_id", "sentences", "slots"}
_SENTENCE_KEYS = {"tokens", "bio", "edges"}
_EDGE_KEYS = {"head", "tail", "label"}


def manifest_path(corpus_path: str | Path) -> Path:
    return Path(str(corpus_path) + ".manifest.json")


def doc_to_record(doc: ProcedureDoc) -> dict:
    """Interchange dict with fixed key order (stable serialization)."""
    return {
        "id": doc.id,
        "source": doc.source,
        "patent_id": doc.patent_id,
        "sentences": [
            {
                "tokens": [t.word for t in s.tokens],
                "bio": [t.entity_bio for t in s.tokens],
                "edges": [
                    {"head": e.head, "tail": e.tail, "label": e.label}
                    for e in s.edges
                ],
            }
            for s in doc.sentences
        ],
        "slots": {k: list(v) for k, v in doc.slots.items()},
    }


def serialize_record(doc: ProcedureDoc) -> str:
    return json.dumps(doc_to_record(doc), ensure_ascii=False, separators=(",", ":"))


def _type_error(path: str, expected: str) -> ValueError:
    return ValueError(f"field {path!r} must be {expected}")


def record_to_doc(obj: object) -> ProcedureDoc:
    """Parse one interchange record; strict about shape and field names.

    Raises ValueError for structural problems. Annotation-level invariants
    (BIO well-formedness, label membership, ...) are left to
    validate_document so they can be reported with coordinates.
    """
    if not isinstance(obj, dict):
        raise ValueError("record must be a JSON object")
    unknown = set(obj) - _RECORD_KEYS
    if unknown:
        raise ValueError(f"unknown record field(s): {sorted(unknown)}")
    missing = _RECORD_KEYS - set(obj)
    if missing:
        raise ValueError(f"missing record field(s): {sorted(missing)}")
    if not isinstance(obj["id"], str):
        raise _type_error("id", "a string")
    if obj["source"] not in SOURCES:
        raise ValueError(f"field 'source' must be one of {list(SOURCES)}")
    if not isinstance(obj["patent_id"], str):
        raise _type_error("patent_id", "a string")
    if not isinstance(obj["sentences"], list):
        raise _type_error("sentences", "a list")
    if not isinstance(obj["slots"], dict):
        raise _type_error("slots", "an object")

    sentences = []
    for si, s in enumerate(obj["sentences"]):
        if not isinstance(s, dict):
            raise _type_error(f"sentences[{si}]", "an object")
        unknown = set(s) - _SENTENCE_KEYS
        if unknown:
            raise ValueError(f"sentences[{si}]: unknown field(s) {sorted(unknown)}")
        missing = _SENTENCE_KEYS - set(s)
        if missing:
            raise ValueError(f"sentences[{si}]: missing field(s) {sorted(missing)}")
        tokens, bio, edges = s["tokens"], s["bio"], s["edges"]
        if not isinstance(tokens, list) or not all(isinstance(w, str) for w in tokens):
            raise _type_error(f"sentences[{si}].tokens", "a list of strings")
        if not isinstance(bio, list) or not all(isinstance(t, str) for t in bio):
            raise _type_error(f"sentences[{si}].bio", "a list of strings")
        if len(tokens) != len(bio):
            raise ValueError(
                f"sentences[{si}]: tokens ({len(tokens)}) and bio ({len(bio)}) "
                "lengths differ"
            )
        if not isinstance(edges, list):
            raise _type_error(f"sentences[{si}].edges", "a list")
        parsed_edges = []
        for ei, e in enumerate(edges):
            if not isinstance(e, dict):
                raise _type_error(f"sentences[{si}].edges[{ei}]", "an object")
            if set(e) != _EDGE_KEYS:
                raise ValueError(
                    f"sentences[{si}].edges[{ei}]: fields must be exactly "
                    f"{sorted(_EDGE_KEYS)}"
                )
            if not isinstance(e["head"], int) or not isinstance(e["tail"], int):
                raise _type_error(
                    f"sentences[{si}].edges[{ei}].head/tail", "integers"
                )
            if not isinstance(e["label"], str):
                raise _type_error(f"sentences[{si}].edges[{ei}].label", "a string")
            parsed_edges.append(SemanticEdge(e["head"], e["tail"], e["label"]))
        sentences.append(SentenceGraph.from_bio(tokens, bio, parsed_edges))

    slots: dict[str, list[str]] = {}
    for k, v in obj["slots"].items():
        if not isinstance(k, str):
            raise _type_error("slots key", "a string")
        if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
            raise _type_error(f"slots[{k!r}]", "a list of strings")
        slots[k] = list(v)

    return ProcedureDoc(
        id=obj["id"],
        source=obj["source"],
        patent_id=obj["patent_id"],
        sentences=tuple(sentences),
        slots=slots,
    )


def write_corpus(
    docs: Iterable[ProcedureDoc], path: str | Path, schema: Schema
) -> Path:
    """Write docs as line-delimited records plus the sidecar manifest.

    read_corpus(write_corpus(docs)) reproduces the documents field-for-field.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(serialize_record(doc))
            fh.write("\n")
    with open(manifest_path(path), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(schema.to_json(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    return path


def read_manifest(path: str | Path) -> Schema:
    mpath = manifest_path(path)
    if not mpath.exists():
        raise CorpusReadError(f"missing manifest {mpath}", 0)
    with open(mpath, encoding="utf-8") as fh:
        return Schema.from_json(json.load(fh))


def read_corpus(
    path: str | Path, schema: Schema | None = None
) -> Iterator[ProcedureDoc]:
    """Stream validated documents from a corpus file, in file order.

    When ``schema`` is given it must match the manifest; otherwise the
    manifest's schema is used. Aborts with :class:`CorpusReadError` on the
    first malformed record (parse error, schema violation, duplicate id).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    declared = read_manifest(path)
    if schema is not None and (
        schema.node_labels != declared.node_labels
        or schema.edge_labels != declared.edge_labels
        or schema.slot_names != declared.slot_names
    ):
        raise CorpusReadError("manifest schema does not match the expected schema", 0)
    schema = schema or declared

    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusReadError(f"invalid JSON: {exc.msg}", line_no) from exc
            try:
                doc = record_to_doc(obj)
            except ValueError as exc:
                raise CorpusReadError(str(exc), line_no) from exc
            report = validate_document(doc, schema)
            if report:
                raise CorpusReadError(
                    "; ".join(str(v) for v in report), line_no, report
                )
            if doc.id in seen:
                raise DuplicateDocumentIdError(doc.id, line_no, seen[doc.id])
            seen[doc.id] = line_no
            yield doc
