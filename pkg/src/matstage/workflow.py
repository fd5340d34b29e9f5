"""The curation state machine.

Curator actions (mark valid, mark invalid, update, remove) and automatic
invalidation all funnel through ``CurationEngine``, which versions updates,
enforces the error-type rule, appends the curation log and triggers
training-data capture. Every mutation is atomic per record chain: a failed
action leaves no trace.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Mapping, Optional

from .collector import TrainingCollector
from .errors import (
    ConflictError,
    ForbiddenTransitionError,
    StaleVersionError,
    ValidationError,
)
from .model import (
    ActionKind,
    Agent,
    CurationLogEntry,
    CurationState,
    ErrorType,
    MaterialRecord,
    Status,
    utcnow_second,
    with_fields,
)
from .parsing import try_parse_pressure, try_parse_temperature
from .store import RecordStore

#: Action kinds available in each status. Internal statuses are terminal.
TRANSITION_TABLE: Mapping[Status, frozenset[ActionKind]] = {
    Status.NEW: frozenset(
        {ActionKind.MARK_VALID, ActionKind.MARK_INVALID, ActionKind.UPDATE, ActionKind.REMOVE}
    ),
    Status.CURATED: frozenset(
        {ActionKind.MARK_VALID, ActionKind.MARK_INVALID, ActionKind.UPDATE, ActionKind.REMOVE}
    ),
    Status.VALIDATED: frozenset(
        {ActionKind.MARK_INVALID, ActionKind.UPDATE, ActionKind.REMOVE}
    ),
    Status.INVALID: frozenset(
        {ActionKind.MARK_VALID, ActionKind.UPDATE, ActionKind.REMOVE}
    ),
    Status.OBSOLETE: frozenset(),
    Status.REMOVED: frozenset(),
}

#: Record fields a curator may change through an update payload.
UPDATABLE_FIELDS = frozenset({"material_raw", "formula", "tc_raw", "pressure_raw"})

#: Action kinds that snapshot training data.
CAPTURING_KINDS = frozenset({ActionKind.UPDATE, ActionKind.REMOVE})


def allowed_actions(state: CurationState) -> frozenset[ActionKind]:
    """Action kinds legal in the given state."""
    return TRANSITION_TABLE[state.status]


@dataclass(frozen=True)
class CurationAction:
    kind: ActionKind
    user: str
    error_type: Optional[ErrorType] = None
    payload: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.user:
            raise ValidationError("actions require a user id")
        if self.kind in (ActionKind.UPDATE, ActionKind.REMOVE) and self.error_type is None:
            raise ValidationError(f"{self.kind.value} requires an error type")
        if self.kind == ActionKind.UPDATE and not self.payload:
            raise ValidationError("update requires a non-empty payload")
        if self.kind != ActionKind.UPDATE and self.payload:
            raise ValidationError("only update actions carry a payload")
        unknown = set(self.payload) - UPDATABLE_FIELDS
        if unknown:
            raise ValidationError(f"payload has unknown fields: {sorted(unknown)}")


@dataclass(frozen=True)
class ActionOutcome:
    new_state: CurationState
    new_record_id: Optional[str]
    training_captured: bool


class CurationEngine:
    """Applies curation actions against the store, one chain at a time."""

    def __init__(
        self,
        store: RecordStore,
        collector: TrainingCollector,
        *,
        double_round: bool = False,
        clock: Callable[[], datetime] = utcnow_second,
        id_factory: Callable[[], str] = lambda: uuid.uuid4().hex,
    ):
        self.store = store
        self.collector = collector
        self.double_round = double_round
        self.clock = clock
        self.id_factory = id_factory
        self._lock = threading.RLock()

    # -- public operations ----------------------------------------------------

    def apply_action(self, record_id: str, action: CurationAction) -> ActionOutcome:
        with self._lock:
            record = self.store.require_record(record_id)
            latest = self.store.latest_in_chain(record_id)
            if latest.record_id != record_id:
                raise StaleVersionError(
                    f"record {record_id!r} is superseded by {latest.record_id!r}"
                )
            if action.kind not in allowed_actions(record.state):
                raise ForbiddenTransitionError(
                    f"{action.kind.value} is not allowed in status "
                    f"{record.state.status.value}"
                )
            if action.kind == ActionKind.MARK_VALID:
                self._check_double_round(record, action.user)
                return self._transition(record, action, Status.VALIDATED)
            if action.kind == ActionKind.MARK_INVALID:
                return self._transition(record, action, Status.INVALID)
            if action.kind == ActionKind.REMOVE:
                return self._remove(record, action)
            return self._update(record, action)

    def validate_second_round(self, record_id: str, user: str) -> ActionOutcome:
        """Mark valid; when the double-round flag is on, the validating user
        must differ from whoever last corrected or invalidated the chain."""
        return self.apply_action(record_id, CurationAction(ActionKind.MARK_VALID, user))

    def history(self, record_id: str) -> list[tuple[MaterialRecord, list[CurationLogEntry]]]:
        """Version chain oldest-first, each with the log entries it received."""
        chain = self.store.chain_of(record_id)
        entries = self.store.read_curation(record_id=record_id)
        return [
            (record, [e for e in entries if e.record_id == record.record_id])
            for record in chain
        ]

    def invalidate_automatically(self, record_id: str, user: str = "anomaly-detection") -> ActionOutcome:
        """Flag a record as (automatic, invalid) on behalf of the anomaly scan."""
        with self._lock:
            record = self.store.require_record(record_id)
            latest = self.store.latest_in_chain(record_id)
            if latest.record_id != record_id:
                raise StaleVersionError(
                    f"record {record_id!r} is superseded by {latest.record_id!r}"
                )
            if ActionKind.MARK_INVALID not in allowed_actions(record.state):
                raise ForbiddenTransitionError(
                    f"mark_invalid is not allowed in status {record.state.status.value}"
                )
            now = self.clock()
            updated = with_fields(
                record,
                state=CurationState(Agent.AUTOMATIC, Status.INVALID),
                error_type=ErrorType.ANOMALY_DETECTION,
                updated_at=now,
                last_editor=user,
            )
            self.store.update_record(updated)
            self._log(record, ActionKind.MARK_INVALID, user, ErrorType.ANOMALY_DETECTION, now)
            return ActionOutcome(updated.state, None, False)

    # -- internals --------------------------------------------------------------

    def _check_double_round(self, record: MaterialRecord, user: str) -> None:
        if not self.double_round:
            return
        entries = self.store.read_curation(record_id=record.record_id)
        correcting = [
            e for e in entries if e.action in (ActionKind.UPDATE, ActionKind.MARK_INVALID)
        ]
        if correcting and correcting[-1].user == user:
            raise ConflictError(
                "second-round validation must come from a different user"
            )

    def _transition(
        self, record: MaterialRecord, action: CurationAction, status: Status
    ) -> ActionOutcome:
        now = self.clock()
        updated = with_fields(
            record,
            state=CurationState(Agent.MANUAL, status),
            error_type=action.error_type or record.error_type,
            updated_at=now,
            last_editor=action.user,
        )
        self.store.update_record(updated)
        self._log(record, action.kind, action.user, action.error_type, now)
        return ActionOutcome(updated.state, None, False)

    def _remove(self, record: MaterialRecord, action: CurationAction) -> ActionOutcome:
        now = self.clock()
        updated = with_fields(
            record,
            state=CurationState(Agent.MANUAL, Status.REMOVED),
            error_type=action.error_type,
            updated_at=now,
            last_editor=action.user,
        )
        self.store.update_record(updated)
        captured = self.collector.capture_safe(record, action.kind, now)
        self._log(record, action.kind, action.user, action.error_type, now)
        return ActionOutcome(updated.state, None, captured)

    def _update(self, record: MaterialRecord, action: CurationAction) -> ActionOutcome:
        merged = dict(action.payload)
        if "material_raw" in merged and not merged["material_raw"]:
            raise ValidationError("material_raw must stay non-empty")
        now = self.clock()
        successor = with_fields(
            record,
            record_id=self.id_factory(),
            state=CurationState(Agent.MANUAL, Status.CURATED),
            previous_version=record.record_id,
            error_type=None,
            created_at=now,
            updated_at=now,
            last_editor=action.user,
            **merged,
        )
        successor = with_fields(
            successor,
            tc_kelvin=try_parse_temperature(successor.tc_raw),
            pressure_gpa=try_parse_pressure(successor.pressure_raw),
        )
        obsolete = with_fields(
            record,
            state=CurationState(Agent.MANUAL, Status.OBSOLETE),
            error_type=action.error_type,
            updated_at=now,
            last_editor=action.user,
        )
        # Insert the successor first so a failure cannot orphan the chain.
        self.store.insert_record(successor)
        self.store.update_record(obsolete)
        captured = self.collector.capture_safe(record, action.kind, now)
        self._log(record, action.kind, action.user, action.error_type, now,
                  new_record_id=successor.record_id)
        return ActionOutcome(successor.state, successor.record_id, captured)

    def _log(
        self,
        record: MaterialRecord,
        kind: ActionKind,
        user: str,
        error_type: Optional[ErrorType],
        now: datetime,
        new_record_id: Optional[str] = None,
    ) -> None:
        chain_ids = [r.record_id for r in self.store.chain_of(record.record_id)]
        updates = self.store.count_updates(chain_ids)
        self.store.append_curation(
            CurationLogEntry(
                record_id=record.record_id,
                action=kind,
                user=user,
                error_type=error_type,
                timestamp=now,
                update_count_after=updates + (1 if kind == ActionKind.UPDATE else 0),
                new_record_id=new_record_id,
            )
        )
