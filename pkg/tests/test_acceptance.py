"""Release gates for the search engine, one test per gate.

Each gate prints a single ``[A#] PASS/FAIL`` line; run with ``-s`` to see
the report inline (``pytest tests/test_acceptance.py -v -s``). The gates:

A1  indexed search equals the brute-force oracle on two seeded corpora
A2  query parser goldens, render round-trip, and fuzz totality
A3  phase-1 candidate pruning never drops a true match
A4  persisted index replays queries identically; corruption is detected
A5  hand-traced matches produce exactly the expected captures
A6  aggregation conserves frequencies; sampling is deterministic
A7  selective query stays under 100 ms warm on a 50k-procedure corpus
"""

import functools
import time

import pytest
from conftest import dilution_sentence, dissolve_sentence, make_doc

from synthsearch.corpus import default_schema
from synthsearch.engine import (
    CaptureSpan,
    aggregate_answers,
    brute_force_search,
    sample_for_review,
    search,
)
from synthsearch.errors import IndexChecksumError, QueryParseError
from synthsearch.fixtures import FixtureSpec, generate_fixtures
from synthsearch.index import build_index, open_index, persist
from synthsearch.queryir import (
    ANY_VALUE,
    ONE,
    PLUS,
    STAR,
    WILDCARD,
    Capture,
    Constraint,
    GraphQuery,
    Keywords,
    Literal,
    Quant,
    TokenConstraint,
    Traversal,
    parse_graph_query,
    parse_slot_query,
    render_query,
    required_terms,
)
from synthsearch.regression import ANALOG_QUERIES, random_queries, run_regression
from synthsearch.rng import SplitMix64

SCHEMA = default_schema()

Q7 = (
    "plasma <acts-on diluted >using "
    "(?<reagent> [entity=B-Reagent][entity=I-Reagent]*)"
)
Q8 = "(?<ph> [entity=B-pH][entity=I-pH]+) <setting titrated >using NaOH"
Q9 = (
    "PTFE filter >measure "
    "(?<pore_size> [entity=B-Generic-Measure][entity=I-Generic-Measure]*)"
)
Q10 = (
    "HATU >measure (?<mole> [] [word=mmol|word=mol]) "
    "[]{1,10} DMF >measure (?<volume> [] [word=ml|word=l])"
)
# the fixture corpus states amounts in mg/g, so the hand-trace and the
# bundled regression run Q10 with the unit alternation widened accordingly
Q10_MASS = (
    "HATU >measure (?<mole> [] [word=mmol|word=mol|word=mg|word=g]) "
    "[]{1,10} DMF >measure (?<volume> [] [word=ml|word=l])"
)


def gate(label, description):
    """Wrap a test so it prints one PASS/FAIL line for its gate."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            started = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"\n[{label}] FAIL {description}")
                raise
            elapsed = time.perf_counter() - started
            print(f"\n[{label}] PASS {description} ({elapsed:.1f}s)")

        return wrapper

    return deco


@pytest.fixture(scope="module")
def corpus_1k():
    return generate_fixtures(FixtureSpec(seed=1, n_procedures=1000))


@pytest.fixture(scope="module")
def index_1k(corpus_1k):
    return build_index(corpus_1k, SCHEMA)


# --- A1: oracle equivalence -------------------------------------------------


@gate("A1", "indexed search equals brute-force oracle on seeds 1 and 2")
def test_a1_oracle_equivalence(corpus_1k, index_1k):
    started = time.perf_counter()
    report = run_regression(index_1k, corpus_1k, random_seed=7, n_random=50)
    assert len(report.rows) == 60
    for row in report.rows:
        assert row.agree, f"{row.name} diverged: {row.divergence}"

    corpus = generate_fixtures(FixtureSpec(seed=2, n_procedures=5000))
    handle = build_index(corpus, SCHEMA)
    report = run_regression(handle, corpus, random_seed=7, n_random=50)
    assert len(report.rows) == 60
    for row in report.rows:
        assert row.agree, f"{row.name} diverged: {row.divergence}"

    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"equivalence suite took {elapsed:.1f}s (budget 60s)"


# --- A2: parser goldens, round-trip, fuzz ------------------------------------


def entity(tag, quant=ONE):
    return Constraint(TokenConstraint((("entity", tag),)), quant)


GRAPH_GOLDENS = {
    Q7: GraphQuery(
        (
            Literal("plasma"),
            Traversal("incoming", "acts-on"),
            Literal("diluted"),
            Traversal("outgoing", "using"),
            Capture("reagent", (entity("B-Reagent"), entity("I-Reagent", STAR))),
        )
    ),
    Q8: GraphQuery(
        (
            Capture("ph", (entity("B-pH"), entity("I-pH", PLUS))),
            Traversal("incoming", "setting"),
            Literal("titrated"),
            Traversal("outgoing", "using"),
            Literal("NaOH"),
        )
    ),
    Q9: GraphQuery(
        (
            Literal("PTFE"),
            Literal("filter"),
            Traversal("outgoing", "measure"),
            Capture(
                "pore_size",
                (
                    entity("B-Generic-Measure"),
                    entity("I-Generic-Measure", STAR),
                ),
            ),
        )
    ),
    Q10: GraphQuery(
        (
            Literal("HATU"),
            Traversal("outgoing", "measure"),
            Capture(
                "mole",
                (
                    Constraint(WILDCARD, ONE),
                    Constraint(
                        TokenConstraint((("word", "mmol"), ("word", "mol"))), ONE
                    ),
                ),
            ),
            Constraint(WILDCARD, Quant(1, 10)),
            Literal("DMF"),
            Traversal("outgoing", "measure"),
            Capture(
                "volume",
                (
                    Constraint(WILDCARD, ONE),
                    Constraint(
                        TokenConstraint((("word", "ml"), ("word", "l"))), ONE
                    ),
                ),
            ),
        )
    ),
}

SLOT_GOLDENS = [
    (
        {"reagent": "triphosgene", "solvent": "?"},
        {"reagent": Keywords(("triphosgene",)), "solvent": ANY_VALUE},
    ),
    (
        {"product": "(5-Methylpyrimidin-2-yl)methanol", "yield_percent": "?"},
        {
            "product": Keywords(("(5-Methylpyrimidin-2-yl)methanol",)),
            "yield_percent": ANY_VALUE,
        },
    ),
    (
        {"reagent": "trimethylsilyldiazomethane", "product": "?"},
        {
            "reagent": Keywords(("trimethylsilyldiazomethane",)),
            "product": ANY_VALUE,
        },
    ),
    (
        {
            "reagent": "chlorosulfonic acid",
            "solvent": "chlorobenzene",
            "product": "?",
        },
        {
            "reagent": Keywords(("chlorosulfonic acid",)),
            "solvent": Keywords(("chlorobenzene",)),
            "product": ANY_VALUE,
        },
    ),
    (
        {"reagent": "CDI OR carbonyldiimidazole", "reaction_time": "?"},
        {
            "reagent": Keywords(("CDI", "carbonyldiimidazole")),
            "reaction_time": ANY_VALUE,
        },
    ),
    (
        {"reagent": "trifluoromethanesulfonic acid", "temperature": "?"},
        {
            "reagent": Keywords(("trifluoromethanesulfonic acid",)),
            "temperature": ANY_VALUE,
        },
    ),
]

FUZZ_ALPHABET = (
    "abwoe []()<>|=?*+{},0123456789"
    "word entity B-Reagent I-Amount >measure <acts-on (?<x> "
    "\t\nµé\U0001f9ea"
)


@gate("A2", "parser goldens, render round-trip, 100k-input fuzz totality")
def test_a2_parser_goldens_and_fuzz():
    for text, expected in GRAPH_GOLDENS.items():
        got = parse_graph_query(text, SCHEMA)
        assert got == expected, text
        assert parse_graph_query(render_query(got), SCHEMA) == got

    for raw, expected in SLOT_GOLDENS:
        assert parse_slot_query(raw, SCHEMA).filters == expected

    rng = SplitMix64(0xF022)
    for _ in range(100_000):
        length = rng.below(48)
        text = "".join(
            FUZZ_ALPHABET[rng.below(len(FUZZ_ALPHABET))] for _ in range(length)
        )
        try:
            q = parse_graph_query(text, SCHEMA)
        except QueryParseError:
            continue
        # accepted inputs must round-trip
        assert parse_graph_query(render_query(q), SCHEMA) == q


# --- A3: phase-1 soundness ----------------------------------------------------


@gate("A3", "phase-1 pruning drops no true match over 200 random queries")
def test_a3_phase1_soundness(corpus_1k, index_1k):
    graph_texts = []
    seed = 31
    while len(graph_texts) < 200:
        graph_texts.extend(
            rq.graph for rq in random_queries(seed, 300) if rq.graph
        )
        seed += 1
    graph_texts = graph_texts[:200]

    for text in graph_texts:
        gq = parse_graph_query(text, index_1k.schema)
        terms = required_terms(gq)
        candidates = index_1k.candidate_sentences(terms)
        shortest = min(len(index_1k.postings(t)) for t in terms)
        assert len(candidates) <= shortest, text

        oracle = brute_force_search(corpus_1k, gq, None, prefilter=False)
        true_sids = {m.locator.sentence_id for m in oracle.matches}
        assert true_sids <= set(candidates), f"pruned true match for {text}"


# --- A4: persistence ----------------------------------------------------------


def replay_queries(schema):
    """Twenty mixed queries: the ten bundled analogs plus ten random ones."""
    pairs = []
    for rq in (*ANALOG_QUERIES, *random_queries(seed=19, count=10)):
        gq = parse_graph_query(rq.graph, schema) if rq.graph else None
        sq = parse_slot_query(rq.slots, schema) if rq.slots else None
        pairs.append((gq, sq))
    return pairs[:20]


@gate("A4", "persisted index replays 20 queries identically; flip detected")
def test_a4_persistence_replay_and_corruption(index_1k, tmp_path):
    target = tmp_path / "idx"
    persist(index_1k, target)
    queries = replay_queries(index_1k.schema)
    assert len(queries) == 20
    with open_index(target) as reopened:
        for gq, sq in queries:
            assert search(reopened, gq, sq) == search(index_1k, gq, sq)

    postings = target / "postings.bin"
    blob = bytearray(postings.read_bytes())
    blob[len(blob) // 2] ^= 0x40
    postings.write_bytes(blob)
    with pytest.raises(IndexChecksumError):
        open_index(target)


# --- A5: hand-traced semantics -------------------------------------------------


@gate("A5", "hand-traced dilution and coupling fixtures capture exactly")
def test_a5_hand_traced_captures():
    corpus = [
        make_doc("trace-dilution", [dilution_sentence()]),
        make_doc("trace-coupling", [dissolve_sentence()]),
    ]
    handle = build_index(corpus, SCHEMA)

    resp = search(handle, parse_graph_query(Q7, SCHEMA))
    assert resp.total == 1
    (m,) = resp.matches
    assert m.locator.doc_id == "trace-dilution"
    assert m.captures == {"reagent": CaptureSpan(4, 6, "saline buffer")}

    resp = search(handle, parse_graph_query(Q10_MASS, SCHEMA))
    assert resp.total == 1
    (m,) = resp.matches
    assert m.locator.doc_id == "trace-coupling"
    assert m.captures == {
        "mole": CaptureSpan(3, 5, "380 mg"),
        "volume": CaptureSpan(9, 11, "1 ml"),
    }

    # the mol/mmol alternation cannot match a mass-unit amount
    assert search(handle, parse_graph_query(Q10, SCHEMA)).total == 0


# --- A6: aggregation + sampling -------------------------------------------------


@gate("A6", "aggregation conserves frequencies; sampling is deterministic")
def test_a6_aggregation_and_sampling(corpus_1k, index_1k):
    gq = parse_graph_query(Q7, index_1k.schema)
    resp = search(index_1k, gq)
    table = aggregate_answers(resp, "reagent")
    assert resp.total > 0
    assert sum(freq for _, freq in table.answers) == resp.total
    assert table.total_matches == resp.total
    assert table.distinct == len(table.answers)

    for k in (1, 3, 50):
        first = sample_for_review(table, k, seed=123)
        second = sample_for_review(table, k, seed=123)
        assert first == second
        assert len(first) == min(k, table.distinct)
        assert set(first) <= {answer for answer, _ in table.answers}


# --- A7: desk-scale latency ------------------------------------------------------

SELECTIVE_QUERY = (
    "methylmagnesium bromide >measure "
    "(?<amount> [entity=B-Amount][entity=I-Amount]*)"
)


@gate("A7", "selective query < 100 ms warm on 50k procedures; suite < 5 min")
def test_a7_desk_scale_latency(tmp_path):
    corpus = generate_fixtures(FixtureSpec(seed=3, n_procedures=50_000))
    handle = build_index(corpus, SCHEMA)
    assert handle.stats.sentences > 150_000
    target = tmp_path / "idx"
    persist(handle, target)

    with open_index(target) as disk:
        gq = parse_graph_query(SELECTIVE_QUERY, disk.schema)
        terms = required_terms(gq)
        candidates = disk.candidate_sentences(terms)
        selectivity = len(candidates) / disk.stats.sentences
        assert selectivity < 0.01, f"query not selective: {selectivity:.2%}"

        warmup = search(disk, gq)
        started = time.perf_counter()
        warm = search(disk, gq)
        warm_ms = (time.perf_counter() - started) * 1000.0
        assert warm == warmup
        assert warm.total <= len(candidates)
        assert warm_ms < 100.0, f"warm query took {warm_ms:.1f}ms"

        started = time.perf_counter()
        report = run_regression(disk, corpus, random_seed=7, n_random=50)
        regression_s = time.perf_counter() - started
        assert report.all_agree
        assert regression_s < 300.0, f"regression took {regression_s:.1f}s"
