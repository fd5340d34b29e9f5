# The training-data collector: corrections snapshot their source passage,
# examples move pending -> sent -> exported, and the export document
# reconstructs passages and spans losslessly.

import json

from matstage.collector import TrainingCollector
from matstage.model import (
    ActionKind,
    EntityLabel,
    ErrorType,
    ExampleStatus,
    Passage,
    Span,
    make_record,
)
from matstage.store import RecordStore
from matstage.workflow import CurationAction, CurationEngine

store = RecordStore(":memory:")
collector = TrainingCollector(store)
engine = CurationEngine(store, collector)

store.put_passage(Passage(
    "p1", "0aa1b3161f", "MgB2 shows superconductivity at 39 K.",
    spans=(Span(0, 4, EntityLabel.MATERIAL, "MgB2"),
           Span(32, 36, EntityLabel.TC_VALUE, "39 K")),
))
for i, tc in enumerate(["93 K", "41]"]):
    record = make_record("0aa1b3161f", f"MgB2 sample {i}", "MgB2", tc, None, "p1")
    store.insert_record(record)
    engine.apply_action(record.record_id, CurationAction(
        ActionKind.UPDATE, "alice", error_type=ErrorType.EXTRACTION,
        payload={"tc_raw": "39 K"}))

pending = collector.list_examples(ExampleStatus.PENDING)
print(f"captured {len(pending)} examples from 2 corrections")

collector.mark_sent(pending[0].example_id)
print("statuses:", [e.status.value for e in collector.list_examples()])

document = collector.export_examples()
print("\n== export document ==")
print(json.dumps(document, indent=2)[:400], "...")
print("\nstatuses after export:",
      [e.status.value for e in collector.list_examples()])

store.close()
