# Ingest a small corpus, then run anomaly detection over it.
#
# One document is fine, one is over the page limit, one has no text; the
# processing log explains each outcome. The scan then marks out-of-range
# and unparseable records invalid for curator review.

import json
from pathlib import Path

from matstage.anomaly import AnomalyScanner
from matstage.collector import TrainingCollector
from matstage.ingest import Ingestor
from matstage.store import RecordStore
from matstage.workflow import CurationEngine

CORPUS = Path(__file__).parent.parent / "tests" / "data" / "corpus"

store = RecordStore(":memory:")
engine = CurationEngine(store, TrainingCollector(store))
ingestor = Ingestor(store)

print("== ingestion ==")
for path in sorted(CORPUS.iterdir()):
    entry = ingestor.ingest(json.loads(path.read_text(encoding="utf-8")))
    print(f"  {path.name:24} -> {entry.outcome}"
          + (f" ({entry.reason})" if entry.reason else
             f" passages={entry.passages} records={entry.records}"))

print("\n== anomaly scan ==")
report = AnomalyScanner(engine).scan_all()
print(f"  checked {report.checked} records")
for rule, count in report.counts.items():
    print(f"  {rule:22} {count}")
print(f"  transitioned to invalid: {report.transitioned}")

print("\n== resulting table ==")
for record in store.all_visible_records():
    state = record.state
    print(f"  {record.material_raw:16} tc={record.tc_raw:8} "
          f"({state.agent.value}, {state.status.value})"
          + (f" error={record.error_type.value}" if record.error_type else ""))

store.close()
