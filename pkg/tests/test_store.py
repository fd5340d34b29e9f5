from __future__ import annotations

import io

import pytest

from matstage.errors import ConflictError, NotFoundError, ValidationError
from matstage.model import (
    Agent,
    CurationLogEntry,
    CurationState,
    ActionKind,
    ProcessingLogEntry,
    Status,
    make_record,
    utcnow_second,
    with_fields,
)
from matstage.store import Page, Query, RecordStore

from conftest import FROZEN_TIME


def rec(document_id="0aa1b3161f", material="MgB2", record_id=None, **kwargs):
    record = make_record(document_id, material, material, "39 K", None, "p1",
                         record_id=record_id, now=FROZEN_TIME)
    return with_fields(record, **kwargs) if kwargs else record


class TestPutVersion:
    def test_read_your_writes(self, store):
        record = rec(record_id="r1")
        store.insert_record(record)
        assert store.get_latest("r1") == record

    def test_duplicate_id_rejected(self, store):
        store.insert_record(rec(record_id="r1"))
        with pytest.raises(ConflictError):
            store.insert_record(rec(record_id="r1"))

    def test_dangling_previous_version_rejected(self, store):
        with pytest.raises(ValidationError):
            store.insert_record(rec(record_id="r2", previous_version="ghost"))

    def test_second_successor_rejected(self, store):
        store.insert_record(rec(record_id="r1"))
        store.insert_record(rec(record_id="r2", previous_version="r1",
                                state=CurationState(Agent.MANUAL, Status.CURATED)))
        with pytest.raises(ConflictError):
            store.insert_record(rec(record_id="r3", previous_version="r1",
                                    state=CurationState(Agent.MANUAL, Status.CURATED)))

    def test_survives_reopen(self, tmp_path):
        path = tmp_path / "store.db"
        store = RecordStore(path)
        store.insert_record(rec(record_id="r1"))
        store.append_processing(ProcessingLogEntry(
            document_id="0aa1b3161f", outcome="ok", timestamp=utcnow_second()))
        store.close()
        reopened = RecordStore(path)
        assert reopened.get_latest("r1") == rec(record_id="r1")
        assert len(reopened.read_processing()) == 1
        reopened.close()


class TestGetLatest:
    def seed_chain(self, store):
        store.insert_record(rec(record_id="r1",
                                state=CurationState(Agent.MANUAL, Status.OBSOLETE)))
        store.insert_record(rec(record_id="r2", previous_version="r1",
                                state=CurationState(Agent.MANUAL, Status.OBSOLETE)))
        store.insert_record(rec(record_id="r3", previous_version="r2",
                                state=CurationState(Agent.MANUAL, Status.CURATED)))

    def test_walks_to_head(self, store):
        self.seed_chain(store)
        for any_id in ("r1", "r2", "r3"):
            assert store.get_latest(any_id).record_id == "r3"

    def test_removed_chain_yields_none(self, store):
        store.insert_record(rec(record_id="r1",
                                state=CurationState(Agent.MANUAL, Status.REMOVED)))
        assert store.get_latest("r1") is None

    def test_unknown_id(self, store):
        with pytest.raises(NotFoundError):
            store.get_latest("ghost")

    def test_chain_of_is_oldest_first(self, store):
        self.seed_chain(store)
        assert [r.record_id for r in store.chain_of("r2")] == ["r1", "r2", "r3"]


class TestQuery:
    def seed(self, store):
        store.insert_record(rec(record_id="r1", material="MgB2", tc_kelvin=39.0))
        store.insert_record(rec(document_id="02c4f00127", record_id="r2",
                                material="LaH10", tc_kelvin=250.0, pressure_gpa=150.0))
        store.insert_record(rec(document_id="02c4f00127", record_id="r3",
                                material="H3S", tc_kelvin=203.0,
                                state=CurationState(Agent.AUTOMATIC, Status.INVALID)))
        store.insert_record(rec(record_id="r4", material="hidden",
                                state=CurationState(Agent.MANUAL, Status.OBSOLETE)))

    def test_visibility(self, store):
        self.seed(store)
        page = store.query_records(Query())
        assert {r.record_id for r in page.rows} == {"r1", "r2", "r3"}
        assert page.total == 3

    def test_status_filter(self, store):
        self.seed(store)
        page = store.query_records(Query(status="invalid"))
        assert [r.record_id for r in page.rows] == ["r3"]

    def test_material_substring(self, store):
        self.seed(store)
        page = store.query_records(Query(material="MgB"))
        assert page.total == 1
        assert page.rows[0].material_raw == "MgB2"

    def test_tc_range(self, store):
        self.seed(store)
        page = store.query_records(Query(tc_min=100.0, tc_max=240.0))
        assert {r.record_id for r in page.rows} == {"r3"}

    def test_sort_descending_with_nulls_last(self, store):
        self.seed(store)
        store.insert_record(rec(record_id="r5", material="unknown", tc_kelvin=None))
        page = store.query_records(Query(sort="tc_kelvin", direction="desc"))
        values = [r.tc_kelvin for r in page.rows]
        assert values == [250.0, 203.0, 39.0, None]

    def test_default_order_groups_by_document(self, store):
        self.seed(store)
        documents = [r.document_id for r in store.query_records(Query()).rows]
        assert documents == sorted(documents)

    def test_pagination_soundness(self, store):
        self.seed(store)
        unpaginated = store.query_records(Query(size=500)).rows
        collected = []
        page_no = 1
        while True:
            page = store.query_records(Query(size=2, page=page_no))
            assert page.total == len(unpaginated)
            if not page.rows:
                break
            collected.extend(page.rows)
            page_no += 1
        assert [r.record_id for r in collected] == [r.record_id for r in unpaginated]

    def test_bad_queries_rejected(self):
        with pytest.raises(ValidationError):
            Query(size=0)
        with pytest.raises(ValidationError):
            Query(size=501)
        with pytest.raises(ValidationError):
            Query(sort="nope")
        with pytest.raises(ValidationError):
            Query(status="obsolete")


class TestLogs:
    def test_append_then_read(self, store):
        entry = ProcessingLogEntry(document_id="0aa1b3161f", outcome="failed",
                                   reason="too_big", timestamp=FROZEN_TIME)
        store.append_processing(entry)
        assert store.read_processing() == [entry]
        assert store.read_processing("0aa1b3161f") == [entry]
        assert store.read_processing("02c4f00127") == []

    def test_curation_filter_covers_whole_chain(self, store):
        store.insert_record(rec(record_id="r1",
                                state=CurationState(Agent.MANUAL, Status.OBSOLETE)))
        store.insert_record(rec(record_id="r2", previous_version="r1",
                                state=CurationState(Agent.MANUAL, Status.CURATED)))
        store.insert_record(rec(record_id="other"))
        for target in ("r1", "r2", "other"):
            store.append_curation(CurationLogEntry(
                record_id=target, action=ActionKind.MARK_VALID, user="u",
                timestamp=FROZEN_TIME, update_count_after=0))
        chain_entries = store.read_curation(record_id="r2")
        assert [e.record_id for e in chain_entries] == ["r1", "r2"]


class TestDumpLoad:
    def test_round_trip(self, store):
        store.register_document("0aa1b3161f", 5, "2026-03-14T09:26:53Z")
        store.insert_record(rec(record_id="r1"))
        store.append_processing(ProcessingLogEntry(
            document_id="0aa1b3161f", outcome="ok", passages=1, records=1,
            timestamp=FROZEN_TIME))
        buffer = io.StringIO()
        store.dump(buffer)
        target = RecordStore(":memory:")
        count = target.load(io.StringIO(buffer.getvalue()))
        assert count == 3
        second = io.StringIO()
        target.dump(second)
        assert second.getvalue() == buffer.getvalue()
        target.close()

    def test_load_requires_empty_store(self, store):
        store.insert_record(rec(record_id="r1"))
        buffer = io.StringIO()
        store.dump(buffer)
        with pytest.raises(ConflictError):
            store.load(io.StringIO(buffer.getvalue()))
