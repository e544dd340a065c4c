"""Bundled regression workload: ten analog queries plus seeded random ones.

The ten analogs adapt a published set of chemist-proposed questions to the
fixture schema: slot names use this package's identifiers (yield_percent,
reaction_time), and the last analog widens its unit alternation to the mass
units the fixture corpus emits. Each run asserts that indexed search and the
brute-force oracle return byte-identical responses and prints a compact
report (# Proc. = distinct contributing procedures, # Ans. = distinct
normalized answers for the query's answer capture).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from synthsearch.corpus import ProcedureDoc
from synthsearch.engine import (
    SearchResponse,
    aggregate_answers,
    brute_force_search,
    search,
)
from synthsearch.fixtures import Vocab
from synthsearch.index import IndexHandle
from synthsearch.queryir import parse_graph_query, parse_slot_query
from synthsearch.rng import SplitMix64


@dataclass(frozen=True)
class RegressionQuery:
    name: str
    question: str
    graph: str | None = None
    slots: dict[str, str] | None = None
    answer_capture: str | None = None


ANALOG_QUERIES: tuple[RegressionQuery, ...] = (
    RegressionQuery(
        "Q1",
        "solvents used with the reagent triphosgene",
        slots={"reagent": "triphosgene", "solvent": "?"},
        answer_capture="solvent",
    ),
    RegressionQuery(
        "Q2",
        "yields of reactions producing (5-Methylpyrimidin-2-yl)methanol",
        slots={"product": "(5-Methylpyrimidin-2-yl)methanol", "yield_percent": "?"},
        answer_capture="yield_percent",
    ),
    RegressionQuery(
        "Q3",
        "products of reactions containing trimethylsilyldiazomethane",
        slots={"reagent": "trimethylsilyldiazomethane", "product": "?"},
        answer_capture="product",
    ),
    RegressionQuery(
        "Q4",
        "products from chlorosulfonic acid in chlorobenzene",
        slots={
            "reagent": "chlorosulfonic acid",
            "solvent": "chlorobenzene",
            "product": "?",
        },
        answer_capture="product",
    ),
    RegressionQuery(
        "Q5",
        "reaction times for CDI (carbonyldiimidazole)",
        slots={"reagent": "CDI OR carbonyldiimidazole", "reaction_time": "?"},
        answer_capture="reaction_time",
    ),
    RegressionQuery(
        "Q6",
        "reaction temperatures for trifluoromethanesulfonic acid",
        slots={"reagent": "trifluoromethanesulfonic acid", "temperature": "?"},
        answer_capture="temperature",
    ),
    RegressionQuery(
        "Q7",
        "reagents used to dilute plasma",
        graph="plasma <acts-on diluted >using "
        "(?<reagent> [entity=B-Reagent][entity=I-Reagent]*)",
        answer_capture="reagent",
    ),
    RegressionQuery(
        "Q8",
        "pH of solutions titrated with NaOH",
        graph="(?<ph> [entity=B-pH][entity=I-pH]+) <setting titrated >using NaOH",
        answer_capture="ph",
    ),
    RegressionQuery(
        "Q9",
        "pore sizes of PTFE filters",
        graph="PTFE filter >measure "
        "(?<pore_size> [entity=B-Generic-Measure][entity=I-Generic-Measure]*)",
        answer_capture="pore_size",
    ),
    RegressionQuery(
        "Q10",
        "amounts of HATU dissolved in DMF",
        graph="HATU >measure (?<mole> [] [word=mmol|word=mol|word=mg|word=g]) "
        "[]{1,10} DMF >measure (?<volume> [] [word=ml|word=l])",
        answer_capture="mole",
    ),
)


def random_queries(
    seed: int, count: int, vocab: Vocab | None = None
) -> list[RegressionQuery]:
    """Deterministic stream of valid queries over the fixture vocabulary."""
    v = vocab if vocab is not None else Vocab()
    rng = SplitMix64(seed)
    queries = []
    for i in range(count):
        kind = rng.below(6)
        name = f"R{i + 1:02d}"
        if kind == 0:
            slots = {}
            anchor = rng.below(3)
            if anchor == 0:
                value = rng.choice(v.reagents)
                if rng.below(4) == 0:
                    value = f"{value} OR {rng.choice(v.reagents)}"
                slots["reagent"] = value
            elif anchor == 1:
                slots["solvent"] = rng.choice(v.solvents)
            else:
                slots["product"] = rng.choice(v.products)
            if rng.below(2):
                extra = rng.choice(
                    ("solvent", "temperature", "reaction_time", "yield_percent")
                )
                slots.setdefault(extra, "?")
            queries.append(
                RegressionQuery(name, "random slot query", slots=slots)
            )
            continue
        if kind == 1:
            reagent = rng.choice(v.reagents)
            graph = (
                f"{reagent} >measure "
                "(?<amount> [entity=B-Amount][entity=I-Amount]*)"
            )
            capture = "amount"
        elif kind == 2:
            sample = rng.choice(v.samples)
            graph = (
                f"{sample} <acts-on diluted >using "
                "(?<reagent> [entity=B-Reagent][entity=I-Reagent]*)"
            )
            capture = "reagent"
        elif kind == 3:
            if rng.below(2):
                verb = rng.choice(("Dissolve", "Suspend", "Add"))
                graph = f"{verb} (?<what> [entity=B-Reagent][entity=I-Reagent]*)"
                capture = "what"
            else:
                graph = (
                    "Heat >setting "
                    "(?<temp> [entity=B-Temperature][entity=I-Temperature]*)"
                )
                capture = "temp"
        elif kind == 4:
            reagent = rng.choice(v.reagents)
            gap = 2 + rng.below(6)
            graph = f"{reagent} []{{1,{gap}}} [entity=B-Amount]"
            capture = None
        else:
            reagent = rng.choice(v.reagents)
            graph = (
                f"{reagent} >measure "
                "(?<amount> [entity=B-Amount][entity=I-Amount]*)"
            )
            capture = "amount"
            queries.append(
                RegressionQuery(
                    name,
                    "random combined query",
                    graph=graph,
                    slots={"solvent": rng.choice(v.solvents)},
                    answer_capture=capture,
                )
            )
            continue
        queries.append(
            RegressionQuery(
                name, "random graph query", graph=graph, answer_capture=capture
            )
        )
    return queries


@dataclass
class RegressionRow:
    name: str
    query_text: str
    matches: int
    procedures: int
    answers: int | None
    agree: bool
    millis: float
    divergence: str | None = None


@dataclass
class RegressionReport:
    rows: list[RegressionRow]

    @property
    def all_agree(self) -> bool:
        return all(row.agree for row in self.rows)

    def format_table(self) -> str:
        header = f"{'query':<6} {'# Proc.':>8} {'# Ans.':>8} {'matches':>8} {'agree':>6} {'ms':>8}  query text"
        lines = [header, "-" * len(header)]
        for row in self.rows:
            answers = "-" if row.answers is None else str(row.answers)
            lines.append(
                f"{row.name:<6} {row.procedures:>8} {answers:>8} "
                f"{row.matches:>8} {'yes' if row.agree else 'NO':>6} "
                f"{row.millis:>8.1f}  {row.query_text}"
            )
        return "\n".join(lines)


def describe_divergence(a: SearchResponse, b: SearchResponse) -> str | None:
    """Human-readable first difference between two responses, if any."""
    if a == b:
        return None
    if a.total != b.total:
        return f"total differs: indexed={a.total} oracle={b.total}"
    for i, (ma, mb) in enumerate(zip(a.matches, b.matches)):
        if ma != mb:
            return f"match {i} differs:\n  indexed: {ma}\n  oracle:  {mb}"
    return f"match count differs: indexed={len(a.matches)} oracle={len(b.matches)}"


def run_query(
    h: IndexHandle, corpus: list[ProcedureDoc], rq: RegressionQuery
) -> RegressionRow:
    schema = h.schema
    gq = parse_graph_query(rq.graph, schema) if rq.graph else None
    sq = parse_slot_query(rq.slots, schema) if rq.slots else None

    started = time.perf_counter()
    indexed = search(h, gq, sq)
    millis = (time.perf_counter() - started) * 1000.0
    oracle = brute_force_search(corpus, gq, sq, prefilter=True)
    divergence = describe_divergence(indexed, oracle)

    answers = None
    if rq.answer_capture is not None:
        answers = aggregate_answers(indexed, rq.answer_capture).distinct
    procedures = len({m.locator.doc_id for m in indexed.matches})
    query_text = rq.graph if rq.graph else json.dumps(rq.slots, sort_keys=True)
    if rq.graph and rq.slots:
        query_text = f"{rq.graph} AND {json.dumps(rq.slots, sort_keys=True)}"
    return RegressionRow(
        name=rq.name,
        query_text=query_text,
        matches=indexed.total,
        procedures=procedures,
        answers=answers,
        agree=divergence is None,
        millis=millis,
        divergence=divergence,
    )


def run_regression(
    h: IndexHandle,
    corpus: list[ProcedureDoc],
    random_seed: int = 7,
    n_random: int = 50,
) -> RegressionReport:
    """Run the bundled analogs plus ``n_random`` seeded random queries."""
    rows = []
    for rq in ANALOG_QUERIES:
        rows.append(run_query(h, corpus, rq))
    for rq in random_queries(random_seed, n_random):
        rows.append(run_query(h, corpus, rq))
    return RegressionReport(rows)
