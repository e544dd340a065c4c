"""Inverted index over sentences, slot metadata store, and docstore.

Terms are (attribute, value) pairs. Every token contributes ("word", word)
and ("word_lc", word.lower()); tokens with a BIO tag other than "O" also
contribute ("entity", tag). The lowercased shadow terms exist so bare
literals can match case-insensitively while [word=...] stays exact.

On-disk layout (one directory)::

    manifest.json   format_version, schema, stats, per-file sha256 checksums
    terms.tsv       attribute <TAB> value <TAB> offset <TAB> length, sorted
    postings.bin    per term: varint count, varint first id, varint deltas
    locators.bin    '<II' (doc ordinal, sentence index) per sentence id
    slots.jsonl     per doc, corpus order: id, first sentence id, slots
    docstore.jsonl  interchange records, corpus order

Postings are delta-encoded LEB128 varints; offsets/lengths in terms.tsv are
byte ranges into postings.bin. Values in terms.tsv escape backslash, tab,
newline, and carriage return. Checksums are verified on open; directories
are replaced atomically (write to temp dir, rename) and never updated in
place. An opened index is immutable and safe for concurrent readers.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import struct
import tempfile
from array import array
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from synthsearch.corpus import (
    ProcedureDoc,
    Schema,
    SentenceGraph,
    validate_document,
)
from synthsearch.errors import (
    CorpusReadError,
    DuplicateDocumentIdError,
    IndexChecksumError,
    IndexVersionError,
    NotAnIndexError,
)
from synthsearch.ingest import record_to_doc, serialize_record
from synthsearch.queryir import AnyValue, SlotQuery

FORMAT_VERSION = 1

Term = tuple[str, str]


@dataclass(frozen=True, slots=True)
class SentenceLocator:
    sentence_id: int
    doc_id: str
    sentence_index: int


@dataclass(frozen=True, slots=True)
class IndexStats:
    procedures: int
    sentences: int
    terms: int
    postings: int

    def to_json(self) -> dict:
        return {
            "procedures": self.procedures,
            "sentences": self.sentences,
            "terms": self.terms,
            "postings": self.postings,
        }

    @classmethod
    def from_json(cls, obj: dict) -> IndexStats:
        return cls(
            procedures=obj["procedures"],
            sentences=obj["sentences"],
            terms=obj["terms"],
            postings=obj["postings"],
        )


@dataclass(frozen=True, slots=True)
class _DocMeta:
    doc_id: str
    first_sentence_id: int
    n_sentences: int
    slots: dict[str, list[str]]


def _encode_varint(value: int, out: bytearray) -> None:
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def _decode_postings(blob: bytes) -> list[int]:
    values: list[int] = []
    pos = 0

    def read() -> int:
        nonlocal pos
        shift = 0
        result = 0
        while True:
            byte = blob[pos]
            pos += 1
            result |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return result
            shift += 7

    count = read()
    current = 0
    for i in range(count):
        delta = read()
        current = delta if i == 0 else current + delta
        values.append(current)
    return values


def _encode_postings(ids) -> bytes:
    out = bytearray()
    _encode_varint(len(ids), out)
    prev = 0
    for i, sid in enumerate(ids):
        _encode_varint(sid if i == 0 else sid - prev, out)
        prev = sid
    return bytes(out)


def _escape_value(value: str) -> str:
    return (
        value.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _unescape_value(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\" and i + 1 < len(value):
            nxt = value[i + 1]
            out.append({"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class IndexHandle:
    """Shared read API; concrete storage in the memory/disk subclasses."""

    schema: Schema
    stats: IndexStats
    _doc_metas: list[_DocMeta]
    _ordinals: dict[str, int]

    def postings(self, term: Term) -> list[int]:
        raise NotImplementedError

    def terms(self) -> Iterator[Term]:
        raise NotImplementedError

    def doc(self, doc_id: str) -> ProcedureDoc:
        raise NotImplementedError

    def raw_record(self, doc_id: str) -> str:
        raise NotImplementedError

    def close(self) -> None:
        pass

    def __enter__(self) -> IndexHandle:
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    @property
    def n_docs(self) -> int:
        return len(self._doc_metas)

    @property
    def n_sentences(self) -> int:
        return self.stats.sentences

    def doc_ids(self) -> list[str]:
        return [m.doc_id for m in self._doc_metas]

    def has_doc(self, doc_id: str) -> bool:
        return doc_id in self._ordinals

    def doc_meta(self, doc_id: str) -> _DocMeta:
        return self._doc_metas[self._ordinals[doc_id]]

    def slot_values(self, doc_id: str) -> dict[str, list[str]]:
        return self.doc_meta(doc_id).slots

    def locator(self, sentence_id: int) -> SentenceLocator:
        ordinal, sentence_index = self._locate(sentence_id)
        return SentenceLocator(
            sentence_id, self._doc_metas[ordinal].doc_id, sentence_index
        )

    def _locate(self, sentence_id: int) -> tuple[int, int]:
        raise NotImplementedError

    def sentence(self, sentence_id: int) -> SentenceGraph:
        ordinal, sentence_index = self._locate(sentence_id)
        return self.doc(self._doc_metas[ordinal].doc_id).sentences[sentence_index]

    def candidate_sentences(self, terms: set[Term]) -> list[int]:
        """Exact intersection of the terms' postings, ascending.

        The smallest list drives; the rest are probed by binary search.
        """
        if not terms:
            raise ValueError("empty term set: phase 1 needs at least one term")
        lists = sorted((self.postings(t) for t in terms), key=len)
        if not lists[0]:
            return []
        result = lists[0]
        for other in lists[1:]:
            if not other:
                return []
            kept = []
            for sid in result:
                i = bisect_left(other, sid)
                if i < len(other) and other[i] == sid:
                    kept.append(sid)
            if not kept:
                return []
            result = kept
        return result

    def filter_docs_by_slots(self, sq: SlotQuery) -> set[str]:
        """Docs satisfying every filter (AND across slots, OR within)."""
        matched = set()
        for meta in self._doc_metas:
            if all(
                _slot_filter_hits(flt, meta.slots.get(name, ()))
                for name, flt in sq.filters.items()
            ):
                matched.add(meta.doc_id)
        return matched


def _slot_filter_hits(flt, values) -> bool:
    if not values:
        return False
    if isinstance(flt, AnyValue):
        return True
    lowered = [v.lower() for v in values]
    return any(k.lower() in v for k in flt.values for v in lowered)


def slot_filter_matches(flt, values) -> list[str]:
    """Values (verbatim, in slot order) that satisfy the filter."""
    if isinstance(flt, AnyValue):
        return list(values)
    return [
        v for v in values if any(k.lower() in v.lower() for k in flt.values)
    ]


class _MemoryIndex(IndexHandle):
    def __init__(
        self,
        schema: Schema,
        postings: dict[Term, array],
        doc_metas: list[_DocMeta],
        docs: dict[str, ProcedureDoc],
        locators: array,
    ) -> None:
        self.schema = schema
        self._postings = postings
        self._doc_metas = doc_metas
        self._ordinals = {m.doc_id: i for i, m in enumerate(doc_metas)}
        self._docs = docs
        # flat (ordinal, sentence_index) pairs, 2 ints per sentence id
        self._locators = locators
        self.stats = IndexStats(
            procedures=len(doc_metas),
            sentences=len(locators) // 2,
            terms=len(postings),
            postings=sum(len(p) for p in postings.values()),
        )

    def postings(self, term: Term) -> list[int]:
        return list(self._postings.get(term, ()))

    def terms(self) -> Iterator[Term]:
        return iter(sorted(self._postings))

    def doc(self, doc_id: str) -> ProcedureDoc:
        return self._docs[doc_id]

    def raw_record(self, doc_id: str) -> str:
        return serialize_record(self._docs[doc_id])

    def _locate(self, sentence_id: int) -> tuple[int, int]:
        base = 2 * sentence_id
        return self._locators[base], self._locators[base + 1]


def build_index(corpus: Iterable[ProcedureDoc], schema: Schema) -> IndexHandle:
    """Build an in-memory index; deterministic given corpus order."""
    postings: dict[Term, array] = {}
    doc_metas: list[_DocMeta] = []
    docs: dict[str, ProcedureDoc] = {}
    first_seen: dict[str, int] = {}
    locators = array("i")
    sentence_id = 0

    for ordinal, doc in enumerate(corpus):
        if doc.id in first_seen:
            raise DuplicateDocumentIdError(
                doc.id, ordinal + 1, first_seen[doc.id] + 1
            )
        first_seen[doc.id] = ordinal
        report = validate_document(doc, schema)
        if report:
            raise CorpusReadError(
                f"document {doc.id!r}: " + "; ".join(str(v) for v in report),
                ordinal + 1,
                report,
            )
        first_sid = sentence_id
        for sentence_index, sentence in enumerate(doc.sentences):
            seen: set[Term] = set()
            for token in sentence.tokens:
                seen.add(("word", token.word))
                seen.add(("word_lc", token.word.lower()))
                if token.entity_bio != "O":
                    seen.add(("entity", token.entity_bio))
            for term in seen:
                postings.setdefault(term, array("i")).append(sentence_id)
            locators.append(ordinal)
            locators.append(sentence_index)
            sentence_id += 1
        doc_metas.append(
            _DocMeta(doc.id, first_sid, len(doc.sentences), doc.slots)
        )
        docs[doc.id] = doc
    return _MemoryIndex(schema, postings, doc_metas, docs, locators)


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


_DATA_FILES = (
    "terms.tsv",
    "postings.bin",
    "locators.bin",
    "slots.jsonl",
    "docstore.jsonl",
)


def persist(handle: IndexHandle, directory: str | Path, force: bool = False) -> Path:
    """Write the index to ``directory``, atomically (temp dir + rename).

    Refuses to replace an existing non-empty directory unless ``force``.
    """
    directory = Path(directory)
    if directory.exists() and any(directory.iterdir()) and not force:
        raise FileExistsError(f"{directory} exists and is not empty")
    directory.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=directory.name + ".", dir=directory.parent))
    try:
        _write_index_files(handle, tmp)
        if directory.exists():
            shutil.rmtree(directory)
        os.replace(tmp, directory)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return directory


def _write_index_files(handle: IndexHandle, out: Path) -> None:
    offset = 0
    with open(out / "postings.bin", "wb") as pfh, open(
        out / "terms.tsv", "w", encoding="utf-8", newline="\n"
    ) as tfh:
        for term in handle.terms():
            blob = _encode_postings(handle.postings(term))
            pfh.write(blob)
            attr, value = term
            tfh.write(
                f"{attr}\t{_escape_value(value)}\t{offset}\t{len(blob)}\n"
            )
            offset += len(blob)

    with open(out / "locators.bin", "wb") as fh:
        for sid in range(handle.n_sentences):
            ordinal, sentence_index = handle._locate(sid)
            fh.write(struct.pack("<II", ordinal, sentence_index))

    with open(out / "slots.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for meta in handle._doc_metas:
            fh.write(
                json.dumps(
                    {
                        "id": meta.doc_id,
                        "first_sentence_id": meta.first_sentence_id,
                        "n_sentences": meta.n_sentences,
                        "slots": meta.slots,
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
            )
            fh.write("\n")

    with open(out / "docstore.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for meta in handle._doc_metas:
            fh.write(handle.raw_record(meta.doc_id))
            fh.write("\n")

    manifest = {
        "format_version": FORMAT_VERSION,
        "schema": handle.schema.to_json(),
        "stats": handle.stats.to_json(),
        "checksums": {name: _sha256_file(out / name) for name in _DATA_FILES},
    }
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


class _DiskIndex(IndexHandle):
    def __init__(self, directory: Path) -> None:
        manifest_file = directory / "manifest.json"
        if not manifest_file.exists():
            raise NotAnIndexError(f"{directory} is not an index (no manifest.json)")
        with open(manifest_file, encoding="utf-8") as fh:
            manifest = json.load(fh)
        if "format_version" not in manifest:
            raise NotAnIndexError(
                f"{directory} is not an index (manifest lacks format_version)"
            )
        version = manifest["format_version"]
        if version != FORMAT_VERSION:
            raise IndexVersionError(
                f"index format version {version!r} is not supported "
                f"(this build reads version {FORMAT_VERSION})"
            )
        for name in _DATA_FILES:
            path = directory / name
            if not path.exists():
                raise NotAnIndexError(f"missing index file {name}")
            actual = _sha256_file(path)
            if actual != manifest["checksums"][name]:
                raise IndexChecksumError(
                    f"checksum mismatch for {name}: index is corrupt"
                )

        self.directory = directory
        self.schema = Schema.from_json(manifest["schema"])
        self.stats = IndexStats.from_json(manifest["stats"])

        self._terms: dict[Term, tuple[int, int]] = {}
        with open(directory / "terms.tsv", encoding="utf-8") as fh:
            for line in fh:
                attr, value, offset, length = line.rstrip("\n").split("\t")
                self._terms[(attr, _unescape_value(value))] = (
                    int(offset),
                    int(length),
                )

        raw = (directory / "locators.bin").read_bytes()
        self._locators = array("i")
        for ordinal, sentence_index in struct.iter_unpack("<II", raw):
            self._locators.append(ordinal)
            self._locators.append(sentence_index)

        self._doc_metas = []
        with open(directory / "slots.jsonl", encoding="utf-8") as fh:
            for line in fh:
                obj = json.loads(line)
                self._doc_metas.append(
                    _DocMeta(
                        obj["id"],
                        obj["first_sentence_id"],
                        obj["n_sentences"],
                        obj["slots"],
                    )
                )
        self._ordinals = {m.doc_id: i for i, m in enumerate(self._doc_metas)}

        # byte offset of each docstore line; records parse lazily on access
        self._doc_offsets: list[int] = [0]
        data = (directory / "docstore.jsonl").read_bytes()
        start = 0
        while True:
            nl = data.find(b"\n", start)
            if nl == -1:
                break
            start = nl + 1
            self._doc_offsets.append(start)
        self._docstore = open(directory / "docstore.jsonl", "rb")
        self._postings_file = open(directory / "postings.bin", "rb")
        self._postings_cache: dict[Term, list[int]] = {}
        self._doc_cache: dict[str, ProcedureDoc] = {}

    def close(self) -> None:
        self._docstore.close()
        self._postings_file.close()

    def postings(self, term: Term) -> list[int]:
        cached = self._postings_cache.get(term)
        if cached is not None:
            return cached
        location = self._terms.get(term)
        if location is None:
            return []
        offset, length = location
        self._postings_file.seek(offset)
        decoded = _decode_postings(self._postings_file.read(length))
        self._postings_cache[term] = decoded
        return decoded

    def terms(self) -> Iterator[Term]:
        return iter(sorted(self._terms))

    def raw_record(self, doc_id: str) -> str:
        ordinal = self._ordinals[doc_id]
        start = self._doc_offsets[ordinal]
        end = self._doc_offsets[ordinal + 1]
        self._docstore.seek(start)
        return self._docstore.read(end - start).decode("utf-8").rstrip("\n")

    def doc(self, doc_id: str) -> ProcedureDoc:
        cached = self._doc_cache.get(doc_id)
        if cached is None:
            cached = record_to_doc(json.loads(self.raw_record(doc_id)))
            self._doc_cache[doc_id] = cached
        return cached

    def _locate(self, sentence_id: int) -> tuple[int, int]:
        base = 2 * sentence_id
        return self._locators[base], self._locators[base + 1]


def open_index(directory: str | Path) -> IndexHandle:
    """Open a persisted index; verifies format version and checksums."""
    directory = Path(directory)
    if not directory.is_dir():
        raise NotAnIndexError(f"{directory} is not a directory")
    return _DiskIndex(directory)
