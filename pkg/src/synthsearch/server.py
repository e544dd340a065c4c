"""HTTP facade over an opened index.

Endpoints (JSON bodies, UTF-8):

- ``POST /api/search`` body ``{"graph_query"?: str, "slot_query"?: {slot:
  str}, "page"?: {"offset": int, "limit": int}}`` returns ``{"total": int,
  "matches": [{"doc_id", "sentence_index", "text", "span": [start, end],
  "captures": {name: {"span": [s, e], "text": str}}}], "page": {...}}``.
  Spans are token indices into the tokenization used at ingest; "text" is
  the detokenized sentence.
- ``POST /api/aggregate`` body adds ``capture`` plus optional ``sample_k``
  and ``seed``; returns ``{"capture", "distinct", "procedures",
  "total_matches", "answers": [{"answer", "frequency"}], "sample"?}``.
  Aggregation always runs over the full (unpaginated) match set.
- ``GET /api/procedure/{id}`` returns the stored interchange record,
  byte-faithful.
- ``GET /api/schema`` returns node/edge/slot inventories plus corpus stats.
- ``GET /healthz`` returns "ok".

Errors are ``{"code", "message", "position"}`` with code one of bad_query,
unknown_slot, unknown_label, not_found, internal; graph query parse errors
always carry the character offset in ``position``. Responses are a pure
function of (index, request body). The service is stateless over an
immutable index; restart to pick up a rebuilt index.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, ConfigDict

from synthsearch.engine import (
    Match,
    Page,
    aggregate_answers,
    sample_for_review,
    search,
)
from synthsearch.errors import (
    QueryParseError,
    UnknownCaptureError,
    UnknownLabelError,
    UnknownSlotError,
)
from synthsearch.index import IndexHandle, open_index
from synthsearch.queryir import (
    GraphQuery,
    SlotQuery,
    capture_names,
    parse_graph_query,
    parse_slot_query,
)

DEFAULT_PAGE_LIMIT = 20
MAX_PAGE_LIMIT = 500


class ApiError(Exception):
    def __init__(
        self,
        code: str,
        message: str,
        position: int | None = None,
        status: int = 400,
    ) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.position = position
        self.status = status


class PageBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    offset: int = 0
    limit: int | None = None


class SearchBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    graph_query: str | None = None
    slot_query: dict[str, str] | None = None
    page: PageBody | None = None


class AggregateBody(SearchBody):
    capture: str = ""
    sample_k: int | None = None
    seed: int = 0


def _to_api_error(exc: Exception) -> ApiError:
    if isinstance(exc, UnknownLabelError):
        return ApiError("unknown_label", str(exc), exc.position)
    if isinstance(exc, QueryParseError):
        return ApiError("bad_query", str(exc), exc.position)
    if isinstance(exc, UnknownSlotError):
        return ApiError("unknown_slot", str(exc))
    if isinstance(exc, UnknownCaptureError):
        return ApiError("bad_query", str(exc))
    if isinstance(exc, ValueError):
        return ApiError("bad_query", str(exc))
    return ApiError("internal", str(exc), status=500)


def _parse_queries(
    h: IndexHandle, body: SearchBody
) -> tuple[GraphQuery | None, SlotQuery | None]:
    gq = None
    sq = None
    if body.graph_query is not None and body.graph_query.strip():
        gq = parse_graph_query(body.graph_query, h.schema)
    if body.slot_query:
        sq = parse_slot_query(body.slot_query, h.schema)
    if gq is None and sq is None:
        raise ApiError(
            "bad_query", "at least one of graph_query and slot_query is required"
        )
    return gq, sq


def _match_wire(h: IndexHandle, m: Match) -> dict:
    text = ""
    if m.locator.sentence_id >= 0:
        text = h.sentence(m.locator.sentence_id).text()
    return {
        "doc_id": m.locator.doc_id,
        "sentence_index": m.locator.sentence_index,
        "text": text,
        "span": [m.span[0], m.span[1]],
        "captures": {
            name: {"span": [c.start, c.end], "text": c.text}
            for name, c in sorted(m.captures.items())
        },
    }


def create_app(
    h: IndexHandle, cors_origins: tuple[str, ...] = ()
) -> FastAPI:
    app = FastAPI(title="synthsearch", docs_url=None, redoc_url=None)
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status,
            content={
                "code": exc.code,
                "message": exc.message,
                "position": exc.position,
            },
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"code": "bad_query", "message": str(exc), "position": None},
        )

    @app.exception_handler(Exception)
    async def handle_internal(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(
            status_code=500,
            content={"code": "internal", "message": str(exc), "position": None},
        )

    @app.post("/api/search")
    async def api_search(body: SearchBody) -> JSONResponse:
        try:
            gq, sq = _parse_queries(h, body)
            page_body = body.page or PageBody()
            limit = (
                DEFAULT_PAGE_LIMIT if page_body.limit is None else page_body.limit
            )
            if limit > MAX_PAGE_LIMIT:
                raise ApiError(
                    "bad_query", f"page limit exceeds maximum {MAX_PAGE_LIMIT}"
                )
            resp = search(h, gq, sq, Page(page_body.offset, limit))
        except ApiError:
            raise
        except Exception as exc:
            raise _to_api_error(exc) from exc
        return JSONResponse(
            {
                "total": resp.total,
                "matches": [_match_wire(h, m) for m in resp.matches],
                "page": {"offset": resp.offset, "limit": resp.limit},
            }
        )

    @app.post("/api/aggregate")
    async def api_aggregate(body: AggregateBody) -> JSONResponse:
        try:
            if not body.capture:
                raise ApiError("bad_query", "capture name is required")
            gq, sq = _parse_queries(h, body)
            valid = set(capture_names(gq)) if gq else set()
            if gq is None and sq is not None:
                valid |= set(sq.filters)
            resp = search(h, gq, sq, Page(0, None))
            table = aggregate_answers(resp, body.capture, valid)
            wire = {
                "capture": table.capture,
                "distinct": table.distinct,
                "procedures": table.procedures,
                "total_matches": table.total_matches,
                "answers": [
                    {"answer": answer, "frequency": freq}
                    for answer, freq in table.answers
                ],
            }
            if body.sample_k is not None:
                wire["sample"] = sample_for_review(table, body.sample_k, body.seed)
        except ApiError:
            raise
        except Exception as exc:
            raise _to_api_error(exc) from exc
        return JSONResponse(wire)

    @app.get("/api/procedure/{doc_id}")
    async def api_procedure(doc_id: str) -> Response:
        if not h.has_doc(doc_id):
            raise ApiError("not_found", f"no procedure {doc_id!r}", status=404)
        return Response(
            content=h.raw_record(doc_id), media_type="application/json"
        )

    @app.get("/api/schema")
    async def api_schema() -> JSONResponse:
        return JSONResponse(
            {
                "node_labels": sorted(h.schema.node_labels),
                "edge_labels": sorted(h.schema.edge_labels),
                "slot_names": sorted(h.schema.slot_names),
                "corpus_stats": {
                    "procedures": h.stats.procedures,
                    "sentences": h.stats.sentences,
                    "terms": h.stats.terms,
                },
            }
        )

    @app.get("/healthz")
    async def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    return app


def create_app_from_dir(
    index_dir: str | Path, cors_origins: tuple[str, ...] = ()
) -> FastAPI:
    return create_app(open_index(index_dir), cors_origins)
