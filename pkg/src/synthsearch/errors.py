"""Exception types shared across the package."""

from __future__ import annotations


class SynthSearchError(Exception):
    """Base class for all package errors."""


class QueryParseError(SynthSearchError):
    """Raised when a graph query string is rejected.

    ``position`` is the 0-based character offset of the offending input
    (equal to the byte offset for ASCII queries); ``expected`` is a short
    hint about what the parser would have accepted there.
    """

    def __init__(self, message: str, position: int, expected: str | None = None):
        self.position = position
        self.expected = expected
        super().__init__(f"{message} at offset {position}")


class UnknownLabelError(QueryParseError):
    """An entity or relation label not declared by the schema."""

    def __init__(self, kind: str, label: str, position: int):
        self.kind = kind
        self.label = label
        super().__init__(f"unknown {kind} label {label!r}", position)


class UnknownSlotError(SynthSearchError):
    """A slot name not declared by the schema."""

    def __init__(self, slot: str):
        self.slot = slot
        super().__init__(f"unknown slot name {slot!r}")


class MalformedBioError(SynthSearchError):
    """A BIO tag sequence that cannot be decoded into mentions."""

    def __init__(self, message: str, token_index: int):
        self.token_index = token_index
        super().__init__(f"{message} at token {token_index}")


class CorpusReadError(SynthSearchError):
    """A corpus file record that fails to parse or validate.

    ``line_no`` is 1-based; ``report`` carries validation violations when
    the record parsed but broke a schema invariant.
    """

    def __init__(self, message: str, line_no: int, report=None):
        self.line_no = line_no
        self.report = report or []
        super().__init__(f"line {line_no}: {message}")


class DuplicateDocumentIdError(CorpusReadError):
    def __init__(self, doc_id: str, line_no: int, first_line_no: int):
        self.doc_id = doc_id
        self.first_line_no = first_line_no
        super().__init__(
            f"duplicate document id {doc_id!r} (first seen at line {first_line_no})",
            line_no,
        )


class NotAnIndexError(SynthSearchError):
    """Directory does not contain an index (no readable manifest)."""


class IndexVersionError(SynthSearchError):
    """Index manifest declares an unsupported format version."""


class IndexChecksumError(SynthSearchError):
    """An index file does not match the checksum recorded in the manifest."""


class UnknownCaptureError(SynthSearchError):
    """Aggregation over a capture name the query does not define."""

    def __init__(self, capture: str, known: tuple[str, ...]):
        self.capture = capture
        self.known = known
        super().__init__(
            f"unknown capture {capture!r}; query defines {sorted(known)!r}"
        )
