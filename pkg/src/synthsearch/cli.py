"""Command line entry points.

Subcommands:

- ``gen-fixtures --seed S --count N --out corpus.jsonl`` writes a synthetic
  corpus plus its sidecar schema manifest.
- ``index --corpus corpus.jsonl --out idx/ [--force]`` validates the corpus
  and persists an index directory.
- ``query --index idx/ [--graph Q] [--slots JSON]`` runs a search and prints
  one JSON object per match followed by a ``{"total": n}`` trailer. Add
  ``--agg NAME`` for an answer table (optionally ``--sample K --seed S``),
  or ``--oracle --corpus corpus.jsonl`` to answer from a brute-force scan of
  the corpus instead of the index; the two modes print identical bytes for
  the same query.
- ``serve --index idx/ --bind HOST:PORT [--cors-origin URL]`` starts the
  HTTP service.
- ``regression --index idx/ --corpus corpus.jsonl`` replays the bundled
  query suite against both the index and the oracle and reports agreement.

Exit codes: 0 success, 1 runtime failure (I/O, invalid corpus, divergence),
2 usage error (bad flags, malformed query). Output is line-delimited JSON
for machines; add ``--pretty`` for indented human-readable output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from synthsearch.corpus import Schema, default_schema
from synthsearch.engine import (
    Match,
    Page,
    SearchResponse,
    aggregate_answers,
    brute_force_search,
    sample_for_review,
    search,
)
from synthsearch.errors import (
    QueryParseError,
    SynthSearchError,
    UnknownCaptureError,
    UnknownSlotError,
)
from synthsearch.fixtures import FixtureSpec, generate_fixtures
from synthsearch.index import build_index, open_index, persist
from synthsearch.ingest import read_corpus, read_manifest, write_corpus
from synthsearch.queryir import (
    GraphQuery,
    SlotQuery,
    capture_names,
    parse_graph_query,
    parse_slot_query,
)
from synthsearch.regression import run_regression


class UsageError(Exception):
    pass


def _dumps(obj: object, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, ensure_ascii=False, indent=2)
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _match_wire(m: Match, text: str) -> dict:
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


def cmd_gen_fixtures(args: argparse.Namespace) -> int:
    spec = FixtureSpec(seed=args.seed, n_procedures=args.count)
    docs = generate_fixtures(spec)
    write_corpus(docs, args.out, default_schema())
    summary = {
        "procedures": len(docs),
        "sentences": sum(len(d.sentences) for d in docs),
        "out": str(args.out),
    }
    print(_dumps(summary, args.pretty))
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    schema = read_manifest(args.corpus)
    handle = build_index(read_corpus(args.corpus), schema)
    persist(handle, args.out, force=args.force)
    summary = dict(handle.stats.to_json())
    summary["out"] = str(args.out)
    print(_dumps(summary, args.pretty))
    return 0


def _parse_query_args(
    args: argparse.Namespace, schema: Schema
) -> tuple[GraphQuery | None, SlotQuery | None]:
    gq = None
    sq = None
    if args.graph:
        gq = parse_graph_query(args.graph, schema)
    if args.slots:
        try:
            raw = json.loads(args.slots)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--slots is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise UsageError("--slots must be a JSON object")
        sq = parse_slot_query(raw, schema)
    if gq is None and sq is None:
        raise UsageError("provide --graph and/or --slots")
    return gq, sq


def _run_query_command(args: argparse.Namespace) -> tuple[
    SearchResponse, GraphQuery | None, SlotQuery | None, dict[int, str]
]:
    """Run the search; return the response plus sentence texts by id."""
    page = Page(args.offset, args.limit)
    if args.oracle:
        if not args.corpus:
            raise UsageError("--oracle requires --corpus")
        schema = read_manifest(args.corpus)
        docs = list(read_corpus(args.corpus, schema))
        gq, sq = _parse_query_args(args, schema)
        resp = brute_force_search(docs, gq, sq, page, prefilter=True)
        texts = {}
        sid = 0
        for doc in docs:
            for sent in doc.sentences:
                texts[sid] = sent.text()
                sid += 1
        return resp, gq, sq, texts
    if not args.index:
        raise UsageError("provide --index (or --oracle with --corpus)")
    h = open_index(args.index)
    gq, sq = _parse_query_args(args, h.schema)
    resp = search(h, gq, sq, page)
    texts = {
        m.locator.sentence_id: h.sentence(m.locator.sentence_id).text()
        for m in resp.matches
        if m.locator.sentence_id >= 0
    }
    return resp, gq, sq, texts


def cmd_query(args: argparse.Namespace) -> int:
    resp, gq, sq, texts = _run_query_command(args)
    if args.agg:
        valid = set(capture_names(gq)) if gq else set()
        if gq is None and sq is not None:
            valid |= set(sq.filters)
        table = aggregate_answers(resp, args.agg, valid)
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
        if args.sample is not None:
            wire["sample"] = sample_for_review(table, args.sample, args.seed)
        print(_dumps(wire, args.pretty))
        return 0
    if args.pretty:
        wire = {
            "total": resp.total,
            "matches": [
                _match_wire(m, texts.get(m.locator.sentence_id, ""))
                for m in resp.matches
            ],
        }
        print(_dumps(wire, True))
        return 0
    for m in resp.matches:
        print(_dumps(_match_wire(m, texts.get(m.locator.sentence_id, "")), False))
    print(_dumps({"total": resp.total}, False))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from synthsearch.server import create_app

    host, _, port_text = args.bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise UsageError("--bind must look like HOST:PORT")
    app = create_app(open_index(args.index), tuple(args.cors_origin))
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    return 0


def cmd_regression(args: argparse.Namespace) -> int:
    h = open_index(args.index)
    docs = list(read_corpus(args.corpus))
    report = run_regression(h, docs, random_seed=args.seed, n_random=args.n_random)
    if args.pretty:
        print(report.format_table())
    else:
        for row in report.rows:
            print(
                _dumps(
                    {
                        "name": row.name,
                        "query": row.query_text,
                        "matches": row.matches,
                        "procedures": row.procedures,
                        "answers": row.answers,
                        "agree": row.agree,
                        "millis": round(row.millis, 1),
                    },
                    False,
                )
            )
        print(_dumps({"all_agree": report.all_agree}, False))
    if not report.all_agree:
        for row in report.rows:
            if not row.agree:
                print(
                    f"divergence in {row.name}: {row.divergence}", file=sys.stderr
                )
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synthsearch",
        description="Search over semantically annotated synthesis procedures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-fixtures", help="generate a synthetic corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_gen_fixtures)

    p = sub.add_parser("index", help="build an index from a corpus")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--force", action="store_true")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="run a query")
    p.add_argument("--index", type=Path)
    p.add_argument("--graph")
    p.add_argument("--slots", help="slot query as a JSON object")
    p.add_argument("--agg", metavar="CAPTURE", help="aggregate this capture")
    p.add_argument("--sample", type=int, help="sample size for --agg")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument(
        "--oracle", action="store_true", help="brute-force scan instead of index"
    )
    p.add_argument("--corpus", type=Path, help="corpus for --oracle")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("--index", type=Path, required=True)
    p.add_argument("--bind", default="127.0.0.1:8741")
    p.add_argument("--cors-origin", action="append", default=[])
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("regression", help="replay the bundled query suite")
    p.add_argument("--index", type=Path, required=True)
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n-random", type=int, default=50)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_regression)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        QueryParseError,
        UnknownSlotError,
        UnknownCaptureError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SynthSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
