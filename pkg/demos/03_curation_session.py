# A curation session: update a record, validate it in a second round,
# inspect the version chain and the curation log.

from matstage.collector import TrainingCollector
from matstage.model import (
    ActionKind,
    EntityLabel,
    ErrorType,
    Passage,
    Span,
    make_record,
)
from matstage.store import RecordStore
from matstage.workflow import CurationAction, CurationEngine, allowed_actions

store = RecordStore(":memory:")
engine = CurationEngine(store, TrainingCollector(store), double_round=True)

store.put_passage(Passage(
    "p1", "0aa1b3161f", "MgB2 shows superconductivity at 39 K.",
    spans=(Span(0, 4, EntityLabel.MATERIAL, "MgB2"),
           Span(32, 36, EntityLabel.TC_VALUE, "39 K")),
))
record = make_record("0aa1b3161f", "MgB2", "MgB2", "93 K", None, "p1")
store.insert_record(record)

print("fresh record state:", record.state.to_json())
print("allowed actions:", sorted(a.value for a in allowed_actions(record.state)))

# The extractor transposed the digits; alice fixes the value. The update
# obsoletes the old version and creates a corrected one.
outcome = engine.apply_action(record.record_id, CurationAction(
    ActionKind.UPDATE, "alice",
    error_type=ErrorType.EXTRACTION,
    payload={"tc_raw": "39 K"},
))
print("\nafter alice's update:", outcome.new_state.to_json(),
      "| training captured:", outcome.training_captured)

# Double-round validation is on: alice cannot validate her own correction.
try:
    engine.validate_second_round(outcome.new_record_id, "alice")
except Exception as exc:
    print("alice validating her own fix:", exc)

final = engine.validate_second_round(outcome.new_record_id, "bob")
print("after bob's validation:", final.new_state.to_json())

print("\n== version chain ==")
for version, entries in engine.history(outcome.new_record_id):
    print(f"  {version.record_id[:8]}: tc={version.tc_raw:6} "
          f"({version.state.agent.value}, {version.state.status.value})")
    for entry in entries:
        print(f"      log: {entry.action.value} by {entry.user} "
              f"updates={entry.update_count_after}")

store.close()
