import pytest

from synthsearch.corpus import (
    ProcedureDoc,
    SemanticEdge,
    SentenceGraph,
    default_schema,
)
from synthsearch.fixtures import FixtureSpec, generate_fixtures
from synthsearch.index import build_index


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def small_docs():
    return generate_fixtures(FixtureSpec(seed=11, n_procedures=120))


@pytest.fixture(scope="session")
def small_index(small_docs, schema):
    return build_index(small_docs, schema)


def make_sentence(words, bio, edges=()):
    coerced = [
        e if isinstance(e, SemanticEdge) else SemanticEdge(*e) for e in edges
    ]
    return SentenceGraph.from_bio(words, bio, coerced)


def make_doc(doc_id, sentences, slots=None, source="US", patent_id="US-00000001"):
    return ProcedureDoc(
        id=doc_id,
        source=source,
        patent_id=patent_id,
        sentences=tuple(sentences),
        slots={k: list(v) for k, v in (slots or {}).items()},
    )


def dilution_sentence(sample="plasma", diluent=("saline", "buffer")):
    """One sentence shaped like '<sample> was diluted using <diluent> .'"""
    words = [sample, "was", "diluted", "using", *diluent, "."]
    bio = [
        "B-Reagent",
        "O",
        "B-Action",
        "O",
        "B-Reagent",
        *["I-Reagent"] * (len(diluent) - 1),
        "O",
    ]
    edges = [(1, 0, "acts-on"), (1, 2, "using")]
    return make_sentence(words, bio, edges)


def dissolve_sentence(
    reagent="HATU", amount=("380", "mg"), solvent="DMF", volume=("1", "ml")
):
    """'Dissolve <reagent> ( <amount> ) in <solvent> ( <volume> ) and stir .'"""
    words = [
        "Dissolve",
        reagent,
        "(",
        *amount,
        ")",
        "in",
        solvent,
        "(",
        *volume,
        ")",
        "and",
        "stir",
        ".",
    ]
    bio = [
        "B-Action",
        "B-Reagent",
        "O",
        "B-Amount",
        "I-Amount",
        "O",
        "O",
        "B-Reagent",
        "O",
        "B-Amount",
        "I-Amount",
        "O",
        "O",
        "B-Action",
        "O",
    ]
    edges = [
        (0, 1, "acts-on"),
        (0, 3, "using"),
        (1, 2, "measure"),
        (3, 4, "measure"),
        (0, 5, "succ"),
    ]
    return make_sentence(words, bio, edges)
