import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_doc, make_sentence
from synthsearch.corpus import default_schema
from synthsearch.errors import CorpusReadError, DuplicateDocumentIdError
from synthsearch.fixtures import FixtureSpec, generate_fixtures
from synthsearch.ingest import (
    manifest_path,
    read_corpus,
    read_manifest,
    record_to_doc,
    serialize_record,
    write_corpus,
)

SCHEMA = default_schema()


def valid_record():
    return {
        "id": "US-00000001-000000",
        "source": "US",
        "patent_id": "US-00000001",
        "sentences": [
            {
                "tokens": ["Add", "HATU", "."],
                "bio": ["B-Action", "B-Reagent", "O"],
                "edges": [{"head": 0, "tail": 1, "label": "acts-on"}],
            }
        ],
        "slots": {"reagent": ["HATU"]},
    }


def test_record_round_trip():
    doc = record_to_doc(valid_record())
    assert json.loads(serialize_record(doc)) == valid_record()


def test_serialized_key_order_is_stable():
    doc = record_to_doc(valid_record())
    assert list(json.loads(serialize_record(doc))) == [
        "id",
        "source",
        "patent_id",
        "sentences",
        "slots",
    ]


@pytest.mark.parametrize(
    "mutate",
    [
        lambda r: r.update(extra=1),
        lambda r: r.pop("patent_id"),
        lambda r: r.update(id=7),
        lambda r: r.update(source="XYZ"),
        lambda r: r.update(sentences={}),
        lambda r: r["sentences"][0].update(parse="(S)"),
        lambda r: r["sentences"][0].pop("bio"),
        lambda r: r["sentences"][0].update(bio=["B-Action"]),
        lambda r: r["sentences"][0].update(tokens=["Add", 2, "."]),
        lambda r: r["sentences"][0]["edges"][0].pop("label"),
        lambda r: r["sentences"][0]["edges"][0].update(head="x"),
        lambda r: r.update(slots={"reagent": "HATU"}),
        lambda r: r.update(slots={"reagent": ["HATU", 3]}),
    ],
)
def test_record_to_doc_rejects_malformed(mutate):
    record = valid_record()
    mutate(record)
    with pytest.raises(ValueError):
        record_to_doc(record)


def test_record_to_doc_rejects_non_object():
    with pytest.raises(ValueError):
        record_to_doc([1, 2])


# --- file level -----------------------------------------------------------


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    with open(manifest_path(path), "w", encoding="utf-8") as fh:
        json.dump(SCHEMA.to_json(), fh)


def test_write_read_round_trip(tmp_path):
    docs = generate_fixtures(FixtureSpec(seed=21, n_procedures=40))
    path = write_corpus(docs, tmp_path / "c.jsonl", SCHEMA)
    assert list(read_corpus(path)) == docs
    assert read_manifest(path) == SCHEMA


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=0, max_value=25))
def test_round_trip_any_seed(tmp_path_factory, seed, count):
    docs = generate_fixtures(FixtureSpec(seed=seed, n_procedures=count))
    path = tmp_path_factory.mktemp("rt") / "c.jsonl"
    write_corpus(docs, path, SCHEMA)
    assert list(read_corpus(path)) == docs


def test_read_reports_line_numbers(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(path, [json.dumps(valid_record()), "{not json"])
    with pytest.raises(CorpusReadError) as err:
        list(read_corpus(path))
    assert err.value.line_no == 2


def test_read_skips_blank_lines(tmp_path):
    path = tmp_path / "c.jsonl"
    write_lines(path, [json.dumps(valid_record()), ""])
    assert len(list(read_corpus(path))) == 1


def test_read_rejects_duplicate_ids(tmp_path):
    path = tmp_path / "c.jsonl"
    line = json.dumps(valid_record())
    write_lines(path, [line, line])
    with pytest.raises(DuplicateDocumentIdError) as err:
        list(read_corpus(path))
    assert err.value.line_no == 2
    assert err.value.first_line_no == 1


def test_read_rejects_schema_violations_with_report(tmp_path):
    record = valid_record()
    record["sentences"][0]["bio"] = ["B-Action", "B-Wine", "O"]
    path = tmp_path / "c.jsonl"
    write_lines(path, [json.dumps(record)])
    with pytest.raises(CorpusReadError) as err:
        list(read_corpus(path))
    assert any(v.code == "unknown-node-label" for v in err.value.report)


def test_read_requires_manifest(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps(valid_record()) + "\n", encoding="utf-8")
    with pytest.raises(CorpusReadError):
        list(read_corpus(path))


def test_read_rejects_schema_mismatch(tmp_path):
    docs = [make_doc("a", [make_sentence(["x"], ["O"])])]
    path = write_corpus(docs, tmp_path / "c.jsonl", SCHEMA)
    import dataclasses

    other = dataclasses.replace(
        SCHEMA, slot_names=frozenset({"reagent", "solvent"})
    )
    with pytest.raises(CorpusReadError):
        list(read_corpus(path, other))


def test_read_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        list(read_corpus(tmp_path / "absent.jsonl"))


def test_unicode_survives_round_trip(tmp_path):
    sent = make_sentence(["0.45", "µm"], ["B-Generic-Measure", "I-Generic-Measure"])
    docs = [make_doc("µ-doc", [sent])]
    path = write_corpus(docs, tmp_path / "c.jsonl", SCHEMA)
    assert "µm" in path.read_text(encoding="utf-8")
    assert list(read_corpus(path)) == docs
