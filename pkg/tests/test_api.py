from __future__ import annotations

import io

import pytest
from fastapi.testclient import TestClient

from matstage.api import create_app
from matstage.collector import TrainingCollector
from matstage.model import ActionKind, ErrorType
from matstage.store import RecordStore
from matstage.workflow import CurationAction, CurationEngine

from conftest import FROZEN_TIME, document_payload, sequential_ids


def build_stack(frozen_clock, double_round=False):
    store = RecordStore(":memory:")
    collector = TrainingCollector(store, clock=frozen_clock,
                                  id_factory=sequential_ids("ex"))
    engine = CurationEngine(store, collector, double_round=double_round,
                            clock=frozen_clock, id_factory=sequential_ids("rec"))
    return engine


@pytest.fixture
def client(frozen_clock):
    engine = build_stack(frozen_clock)
    with TestClient(create_app(engine)) as c:
        c.engine = engine
        yield c


def ingest_fixture(client, **kwargs):
    response = client.post("/ingest", json=document_payload(**kwargs))
    assert response.status_code == 200
    return response.json()


class TestRecordsEndpoints:
    def test_empty_store(self, client):
        response = client.get("/records")
        assert response.status_code == 200
        assert response.json() == {"rows": [], "total": 0}

    def test_listing_carries_allowed_actions(self, client):
        ingest_fixture(client)
        row = client.get("/records").json()["rows"][0]
        assert row["allowed_actions"] == ["mark_invalid", "mark_valid", "remove", "update"]

    def test_query_parameters_forwarded(self, client):
        ingest_fixture(client)
        assert client.get("/records", params={"material": "MgB"}).json()["total"] == 1
        assert client.get("/records", params={"material": "XYZ"}).json()["total"] == 0
        assert client.get("/records", params={"size": 0}).status_code == 400

    def test_update_without_error_type_is_400(self, client):
        ingest_fixture(client)
        record_id = client.get("/records").json()["rows"][0]["record_id"]
        response = client.post(f"/records/{record_id}/update",
                               json={"user": "alice", "payload": {"tc_raw": "40 K"}})
        assert response.status_code == 400
        assert response.json()["code"] == "validation"

    def test_stale_action_is_409(self, client):
        ingest_fixture(client)
        record_id = client.get("/records").json()["rows"][0]["record_id"]
        first = client.post(f"/records/{record_id}/update", json={
            "user": "alice", "error_type": "extraction",
            "payload": {"tc_raw": "40 K"}})
        assert first.status_code == 200
        second = client.post(f"/records/{record_id}/update", json={
            "user": "alice", "error_type": "extraction",
            "payload": {"tc_raw": "41 K"}})
        assert second.status_code == 409
        assert second.json()["code"] == "stale_version"

    def test_forbidden_transition_is_422(self, client):
        ingest_fixture(client)
        record_id = client.get("/records").json()["rows"][0]["record_id"]
        assert client.post(f"/records/{record_id}/mark-valid",
                           json={"user": "a"}).status_code == 200
        again = client.post(f"/records/{record_id}/mark-valid", json={"user": "a"})
        assert again.status_code == 422
        assert again.json()["code"] == "forbidden_transition"

    def test_unknown_record_is_404(self, client):
        assert client.get("/records/ghost").status_code == 404
        assert client.post("/records/ghost/mark-valid",
                           json={"user": "a"}).status_code == 404

    def test_round_trip_history(self, client):
        ingest_fixture(client, candidates=[
            {"material_raw": "MgB2", "formula": "MgB2", "tc_raw": "500 K",
             "passage_id": "0aa1b3161f-p1"}])
        scan = client.post("/scan", json={}).json()
        assert scan["counts"]["tc_invalid"] == 1
        invalid = client.get("/records", params={"status": "invalid"}).json()
        assert invalid["total"] == 1
        record_id = invalid["rows"][0]["record_id"]
        updated = client.post(f"/records/{record_id}/update", json={
            "user": "alice", "error_type": "extraction",
            "payload": {"tc_raw": "39 K"}}).json()
        final = client.post(f"/records/{updated['new_record_id']}/mark-valid",
                            json={"user": "bob"})
        assert final.status_code == 200
        history = client.get(f"/records/{record_id}/history").json()
        assert len(history) == 2
        actions = [entry["action"] for item in history for entry in item["log"]]
        assert actions == ["mark_invalid", "update", "mark_valid"]
        manual_actions = [a for a in actions if a in ("update", "mark_valid")]
        assert len(manual_actions) == 2


class TestDocumentsAndLogs:
    def test_document_view(self, client):
        ingest_fixture(client)
        doc = client.get("/documents/0aa1b3161f").json()
        assert doc["document_id"] == "0aa1b3161f"
        assert len(doc["passages"]) == 1
        assert len(doc["records"]) == 1
        spans = doc["passages"][0]["spans"]
        assert {s["label"] for s in spans} == {"material", "tcValue"}

    def test_unknown_document_404(self, client):
        assert client.get("/documents/zzzzzzzzzz").status_code == 404

    def test_processing_log_shows_failure_reason(self, client):
        ingest_fixture(client)
        client.post("/ingest", json=document_payload(document_id="02c4f00127",
                                                     page_count=101))
        entries = client.get("/logs/processing").json()
        assert [e["outcome"] for e in entries] == ["ok", "failed"]
        assert entries[1]["reason"] == "too_big"

    def test_curation_log_filter(self, client):
        ingest_fixture(client)
        record_id = client.get("/records").json()["rows"][0]["record_id"]
        client.post(f"/records/{record_id}/mark-valid", json={"user": "a"})
        entries = client.get("/logs/curation", params={"record_id": record_id}).json()
        assert len(entries) == 1
        assert entries[0]["action"] == "mark_valid"


class TestTraining:
    def test_lifecycle_over_http(self, client):
        ingest_fixture(client)
        record_id = client.get("/records").json()["rows"][0]["record_id"]
        client.post(f"/records/{record_id}/update", json={
            "user": "alice", "error_type": "extraction",
            "payload": {"tc_raw": "40 K"}})
        listed = client.get("/training").json()
        assert len(listed) == 1
        example_id = listed[0]["example_id"]
        assert client.post(f"/training/{example_id}/mark-sent").json()["status"] == "sent"
        exported = client.get("/training/export").json()
        assert len(exported) == 1
        assert exported[0]["spans"]
        assert client.delete(f"/training/{example_id}").status_code == 409

    def test_empty_export(self, client):
        response = client.get("/training/export")
        assert response.status_code == 200
        assert response.json() == []


class TestStatsAndAuth:
    def test_stats(self, client):
        ingest_fixture(client)
        stats = client.get("/stats").json()
        assert stats["total_visible"] == 1
        assert stats["by_status"]["new"] == 1

    def test_token_guard(self, frozen_clock):
        engine = build_stack(frozen_clock)
        with TestClient(create_app(engine, auth_token="sekrit")) as client:
            assert client.get("/records").status_code == 401
            ok = client.get("/records", headers={"X-Auth-Token": "sekrit"})
            assert ok.status_code == 200


class TestApiEngineEquivalence:
    def test_http_run_equals_module_run(self, frozen_clock):
        # Drive the same action sequence once over HTTP and once directly
        # against a second engine; the stores must end up byte-identical.
        http_engine = build_stack(frozen_clock)
        module_engine = build_stack(frozen_clock)

        with TestClient(create_app(http_engine)) as client:
            client.post("/ingest", json=document_payload(candidates=[
                {"material_raw": "MgB2", "formula": "MgB2", "tc_raw": "500 K",
                 "passage_id": "0aa1b3161f-p1"},
                {"material_raw": "LaH10", "formula": "LaH10", "tc_raw": "250 K",
                 "passage_id": "0aa1b3161f-p1"},
            ]))
            client.post("/scan", json={})
            flagged = client.get("/records", params={"status": "invalid"}).json()
            record_id = flagged["rows"][0]["record_id"]
            updated = client.post(f"/records/{record_id}/update", json={
                "user": "alice", "error_type": "extraction",
                "payload": {"tc_raw": "39 K"}}).json()
            client.post(f"/records/{updated['new_record_id']}/mark-valid",
                        json={"user": "bob"})
            client.get("/training/export")

        from matstage.anomaly import AnomalyScanner
        from matstage.ingest import Ingestor
        from matstage.store import Query

        ingestor = Ingestor(module_engine.store, clock=module_engine.clock,
                            id_factory=module_engine.id_factory)
        ingestor.ingest(document_payload(candidates=[
            {"material_raw": "MgB2", "formula": "MgB2", "tc_raw": "500 K",
             "passage_id": "0aa1b3161f-p1"},
            {"material_raw": "LaH10", "formula": "LaH10", "tc_raw": "250 K",
             "passage_id": "0aa1b3161f-p1"},
        ]))
        AnomalyScanner(module_engine).scan_all()
        flagged = module_engine.store.query_records(Query(status="invalid"))
        outcome = module_engine.apply_action(
            flagged.rows[0].record_id,
            CurationAction(ActionKind.UPDATE, "alice",
                           error_type=ErrorType.EXTRACTION,
                           payload={"tc_raw": "39 K"}))
        module_engine.apply_action(outcome.new_record_id,
                                   CurationAction(ActionKind.MARK_VALID, "bob"))
        module_engine.collector.export_examples()

        http_dump, module_dump = io.StringIO(), io.StringIO()
        http_engine.store.dump(http_dump)
        module_engine.store.dump(module_dump)
        assert http_dump.getvalue() == module_dump.getvalue()
