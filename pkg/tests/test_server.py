"""Tests for the HTTP facade, exercised in process via ASGI."""

import json

import pytest
from fastapi.testclient import TestClient

from synthsearch.engine import Page, search
from synthsearch.index import persist
from synthsearch.queryir import parse_graph_query
from synthsearch.server import create_app, create_app_from_dir

Q7 = (
    "plasma <acts-on diluted >using "
    "(?<reagent> [entity=B-Reagent][entity=I-Reagent]*)"
)


@pytest.fixture(scope="module")
def client(small_index):
    with TestClient(create_app(small_index)) as c:
        yield c


def post(client, path, body):
    return client.post(path, json=body)


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.text == "ok"


def test_schema_endpoint(client, small_index, schema):
    r = client.get("/api/schema")
    assert r.status_code == 200
    body = r.json()
    assert body["node_labels"] == sorted(schema.node_labels)
    assert body["edge_labels"] == sorted(schema.edge_labels)
    assert body["slot_names"] == sorted(schema.slot_names)
    assert body["corpus_stats"] == {
        "procedures": small_index.stats.procedures,
        "sentences": small_index.stats.sentences,
        "terms": small_index.stats.terms,
    }


def test_search_wire_shape(client, small_index):
    r = post(client, "/api/search", {"graph_query": Q7})
    assert r.status_code == 200
    body = r.json()
    expected = search(small_index, parse_graph_query(Q7, small_index.schema))
    assert body["total"] == expected.total
    assert body["page"] == {"offset": 0, "limit": 20}
    assert len(body["matches"]) == min(expected.total, 20)
    for wire, m in zip(body["matches"], expected.matches):
        assert wire["doc_id"] == m.locator.doc_id
        assert wire["sentence_index"] == m.locator.sentence_index
        assert wire["span"] == [m.span[0], m.span[1]]
        assert wire["text"] == small_index.sentence(m.locator.sentence_id).text()
        assert set(wire["captures"]) == {"reagent"}
        cap = wire["captures"]["reagent"]
        assert cap["span"] == [m.captures["reagent"].start, m.captures["reagent"].end]
        assert cap["text"] == m.captures["reagent"].text


def test_search_slot_query(client, small_index):
    r = post(client, "/api/search", {"slot_query": {"solvent": "?"}})
    assert r.status_code == 200
    body = r.json()
    assert body["total"] > 0
    m = body["matches"][0]
    assert "solvent" in m["captures"]
    assert m["captures"]["solvent"]["text"]


def test_search_pagination(client):
    full = post(client, "/api/search", {"graph_query": "diluted"}).json()
    r = post(
        client,
        "/api/search",
        {"graph_query": "diluted", "page": {"offset": 2, "limit": 3}},
    )
    body = r.json()
    assert body["total"] == full["total"]
    assert body["page"] == {"offset": 2, "limit": 3}
    assert len(body["matches"]) <= 3
    # the window lines up with the unpaginated listing
    refetch = post(
        client,
        "/api/search",
        {"graph_query": "diluted", "page": {"offset": 0, "limit": 5}},
    ).json()
    assert refetch["matches"][2:5] == body["matches"]


def test_search_offset_past_end(client):
    total = post(client, "/api/search", {"graph_query": "diluted"}).json()["total"]
    body = post(
        client,
        "/api/search",
        {"graph_query": "diluted", "page": {"offset": total + 50, "limit": 10}},
    ).json()
    assert body["total"] == total
    assert body["matches"] == []


def test_search_limit_cap(client):
    r = post(
        client,
        "/api/search",
        {"graph_query": "diluted", "page": {"limit": 501}},
    )
    assert r.status_code == 400
    body = r.json()
    assert body["code"] == "bad_query"
    assert "500" in body["message"]


def test_search_requires_some_query(client):
    for body in ({}, {"graph_query": "   "}, {"slot_query": {}}):
        r = post(client, "/api/search", body)
        assert r.status_code == 400
        assert r.json()["code"] == "bad_query"


def test_search_parse_error_carries_position(client):
    r = post(client, "/api/search", {"graph_query": "x [word=b"})
    assert r.status_code == 400
    body = r.json()
    assert body["code"] == "bad_query"
    assert isinstance(body["position"], int)


def test_search_unknown_label(client):
    r = post(client, "/api/search", {"graph_query": "x [entity=B-Wine]"})
    assert r.status_code == 400
    body = r.json()
    assert body["code"] == "unknown_label"
    assert isinstance(body["position"], int)

    r = post(client, "/api/search", {"graph_query": "x >nonsense y"})
    assert r.json()["code"] == "unknown_label"


def test_search_unknown_slot(client):
    r = post(client, "/api/search", {"slot_query": {"flavor": "mint"}})
    assert r.status_code == 400
    assert r.json()["code"] == "unknown_slot"


def test_search_rejects_malformed_body(client):
    r = post(client, "/api/search", {"graph_query": "diluted", "bogus": 1})
    assert r.status_code == 400
    assert r.json()["code"] == "bad_query"

    r = post(client, "/api/search", {"page": {"limit": "ten"}})
    assert r.status_code == 400
    assert r.json()["code"] == "bad_query"


def test_aggregate_conserves_frequency(client):
    r = post(client, "/api/aggregate", {"graph_query": Q7, "capture": "reagent"})
    assert r.status_code == 200
    body = r.json()
    assert body["capture"] == "reagent"
    assert body["distinct"] == len(body["answers"])
    carried = sum(a["frequency"] for a in body["answers"])
    assert carried == body["total_matches"]
    freqs = [a["frequency"] for a in body["answers"]]
    assert freqs == sorted(freqs, reverse=True)
    assert "sample" not in body


def test_aggregate_ignores_pagination(client):
    capped = post(
        client,
        "/api/aggregate",
        {"graph_query": Q7, "capture": "reagent", "page": {"limit": 1}},
    ).json()
    free = post(
        client, "/api/aggregate", {"graph_query": Q7, "capture": "reagent"}
    ).json()
    assert capped == free


def test_aggregate_sample_deterministic(client):
    body = {
        "graph_query": Q7,
        "capture": "reagent",
        "sample_k": 3,
        "seed": 42,
    }
    a = post(client, "/api/aggregate", body).json()
    b = post(client, "/api/aggregate", body).json()
    assert a["sample"] == b["sample"]
    assert len(a["sample"]) == min(3, a["distinct"])
    answers = {row["answer"] for row in a["answers"]}
    assert set(a["sample"]) <= answers


def test_aggregate_slot_only(client):
    r = post(
        client,
        "/api/aggregate",
        {"slot_query": {"reagent": "triphosgene", "solvent": "?"}, "capture": "solvent"},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["capture"] == "solvent"
    assert sum(a["frequency"] for a in body["answers"]) == body["total_matches"]


def test_aggregate_unknown_capture(client):
    r = post(client, "/api/aggregate", {"graph_query": Q7, "capture": "nope"})
    assert r.status_code == 400
    assert r.json()["code"] == "bad_query"


def test_aggregate_requires_capture(client):
    r = post(client, "/api/aggregate", {"graph_query": Q7})
    assert r.status_code == 400
    assert "capture" in r.json()["message"]


def test_procedure_byte_faithful(client, small_index, small_docs):
    doc_id = small_docs[0].id
    r = client.get(f"/api/procedure/{doc_id}")
    assert r.status_code == 200
    assert r.headers["content-type"].startswith("application/json")
    assert r.content == small_index.raw_record(doc_id).encode("utf-8")
    assert json.loads(r.content)["id"] == doc_id


def test_procedure_not_found(client):
    r = client.get("/api/procedure/no-such-doc")
    assert r.status_code == 404
    body = r.json()
    assert body["code"] == "not_found"
    assert "no-such-doc" in body["message"]


def test_cors_header_only_when_configured(small_index):
    open_app = create_app(small_index, cors_origins=("http://localhost:5173",))
    with TestClient(open_app) as c:
        r = c.get("/healthz", headers={"Origin": "http://localhost:5173"})
        assert r.headers.get("access-control-allow-origin") == "http://localhost:5173"

    with TestClient(create_app(small_index)) as c:
        r = c.get("/healthz", headers={"Origin": "http://localhost:5173"})
        assert "access-control-allow-origin" not in r.headers


def test_create_app_from_dir(tmp_path, small_index, small_docs):
    persist(small_index, tmp_path / "idx")
    with TestClient(create_app_from_dir(tmp_path / "idx")) as c:
        assert c.get("/healthz").text == "ok"
        disk = c.post("/api/search", json={"graph_query": Q7}).json()
    with TestClient(create_app(small_index)) as c:
        mem = c.post("/api/search", json={"graph_query": Q7}).json()
    assert disk == mem
