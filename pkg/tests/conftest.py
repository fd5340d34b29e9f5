from __future__ import annotations

import itertools
from datetime import datetime, timedelta, timezone

import pytest

from matstage.collector import TrainingCollector
from matstage.ingest import Ingestor
from matstage.store import RecordStore
from matstage.workflow import CurationEngine

FROZEN_TIME = datetime(2026, 3, 14, 9, 26, 53, tzinfo=timezone.utc)


def sequential_ids(prefix: str):
    counter = itertools.count(1)
    return lambda: f"{prefix}{next(counter):06d}"


class TickingClock:
    """Deterministic clock advancing one second per call."""

    def __init__(self, start: datetime = FROZEN_TIME):
        self.now = start

    def __call__(self) -> datetime:
        current = self.now
        self.now = current + timedelta(seconds=1)
        return current


@pytest.fixture
def frozen_clock():
    return lambda: FROZEN_TIME


@pytest.fixture
def store():
    s = RecordStore(":memory:")
    yield s
    s.close()


@pytest.fixture
def engine(store, frozen_clock):
    collector = TrainingCollector(
        store, clock=frozen_clock, id_factory=sequential_ids("ex")
    )
    return CurationEngine(
        store, collector, clock=frozen_clock, id_factory=sequential_ids("rec")
    )


@pytest.fixture
def ingestor(store, frozen_clock):
    return Ingestor(store, clock=frozen_clock, id_factory=sequential_ids("rec"))


def document_payload(
    document_id: str = "0aa1b3161f",
    page_count: int = 5,
    candidates=None,
    passages=None,
):
    """A well-formed extraction payload with sensible defaults."""
    if passages is None:
        passages = [
            {
                "passage_id": f"{document_id}-p1",
                "text": "MgB2 becomes superconducting at 39 K.",
                "spans": [
                    {"start": 0, "end": 4, "label": "material"},
                    {"start": 32, "end": 36, "label": "tcValue"},
                ],
                "layout_tokens": [
                    {"text": "MgB2", "page": 1, "x": 10.0, "y": 20.0, "width": 30.0, "height": 9.0}
                ],
            }
        ]
    if candidates is None:
        candidates = [
            {
                "material_raw": "MgB2",
                "formula": "MgB2",
                "tc_raw": "39 K",
                "passage_id": passages[0]["passage_id"],
            }
        ]
    return {
        "document_id": document_id,
        "page_count": page_count,
        "passages": passages,
        "candidate_records": candidates,
    }
