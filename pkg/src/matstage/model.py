"""Core domain types for the staging area.

Records enter the system in state (automatic, new) and move through the
curation workflow from there. All types here are immutable value objects;
mutation happens by building a replacement instance through the store or
workflow modules.
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping, Optional

from .errors import ValidationError

DOCUMENT_ID_RE = re.compile(r"^[0-9a-f]{10}$")


class Agent(str, Enum):
    AUTOMATIC = "automatic"
    MANUAL = "manual"


class Status(str, Enum):
    NEW = "new"
    CURATED = "curated"
    VALIDATED = "validated"
    INVALID = "invalid"
    OBSOLETE = "obsolete"
    REMOVED = "removed"


#: Statuses hidden from every default listing.
INTERNAL_STATUSES = frozenset({Status.OBSOLETE, Status.REMOVED})

#: Statuses that only a manual action can produce.
_MANUAL_ONLY = frozenset({Status.CURATED, Status.VALIDATED, Status.REMOVED})


class ErrorType(str, Enum):
    """Reason attached to a record when it is updated, removed or flagged."""

    FROM_TABLE = "from_table"
    EXTRACTION = "extraction"
    LINKING = "linking"
    TC_CLASSIFICATION = "tc_classification"
    COMPOSITION_RESOLUTION = "composition_resolution"
    VALUE_RESOLUTION = "value_resolution"
    ANOMALY_DETECTION = "anomaly_detection"
    CURATION_AMENDS = "curation_amends"


class EntityLabel(str, Enum):
    """Label set of the extraction model. Values are the model's own names."""

    CLASS = "class"
    MATERIAL = "material"
    ME_METHOD = "me_method"
    PRESSURE = "pressure"
    TC = "tc"
    TC_VALUE = "tcValue"


@dataclass(frozen=True)
class CurationState:
    agent: Agent
    status: Status

    def __post_init__(self):
        if self.status == Status.NEW and self.agent != Agent.AUTOMATIC:
            raise ValidationError("status 'new' requires agent 'automatic'")
        if self.status in _MANUAL_ONLY and self.agent != Agent.MANUAL:
            raise ValidationError(f"status '{self.status.value}' requires agent 'manual'")

    def to_json(self) -> dict:
        return {"agent": self.agent.value, "status": self.status.value}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "CurationState":
        return cls(Agent(data["agent"]), Status(data["status"]))


@dataclass(frozen=True)
class Span:
    """A labeled character interval within a passage."""

    start: int
    end: int
    label: EntityLabel
    text: str

    def validate_against(self, passage_text: str) -> None:
        if not (0 <= self.start < self.end <= len(passage_text)):
            raise ValidationError(
                f"span [{self.start},{self.end}) out of bounds for passage of "
                f"length {len(passage_text)}"
            )
        if passage_text[self.start : self.end] != self.text:
            raise ValidationError(
                f"span text {self.text!r} does not match passage substring"
            )

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "label": self.label.value,
            "text": self.text,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Span":
        return cls(int(data["start"]), int(data["end"]), EntityLabel(data["label"]), data["text"])


@dataclass(frozen=True)
class LayoutToken:
    """One page-layout token: text plus its bounding box on a page."""

    text: str
    page: int
    x: float
    y: float
    width: float
    height: float

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "page": self.page,
            "x": self.x,
            "y": self.y,
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "LayoutToken":
        return cls(
            data["text"],
            int(data["page"]),
            float(data["x"]),
            float(data["y"]),
            float(data["width"]),
            float(data["height"]),
        )


@dataclass(frozen=True)
class Passage:
    """Source text passage with its recognised entity spans."""

    passage_id: str
    document_id: str
    text: str
    spans: tuple[Span, ...] = ()
    layout_tokens: tuple[LayoutToken, ...] = ()

    def __post_init__(self):
        taken: list[tuple[int, int]] = []
        for span in self.spans:
            span.validate_against(self.text)
            for s, e in taken:
                if span.start < e and s < span.end:
                    raise ValidationError(
                        f"overlapping spans in passage {self.passage_id}"
                    )
            taken.append((span.start, span.end))

    def to_json(self) -> dict:
        return {
            "passage_id": self.passage_id,
            "document_id": self.document_id,
            "text": self.text,
            "spans": [s.to_json() for s in self.spans],
            "layout_tokens": [t.to_json() for t in self.layout_tokens],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Passage":
        return cls(
            passage_id=data["passage_id"],
            document_id=data["document_id"],
            text=data["text"],
            spans=tuple(Span.from_json(s) for s in data.get("spans", [])),
            layout_tokens=tuple(LayoutToken.from_json(t) for t in data.get("layout_tokens", [])),
        )


@dataclass(frozen=True)
class MaterialRecord:
    """One material-T_c(-pressure) tuple with its curation state.

    ``previous_version`` links to the superseded (obsolete) version; at most
    one record per chain is visible at any time.
    """

    record_id: str
    document_id: str
    material_raw: str
    formula: str
    tc_raw: str
    passage_id: str
    state: CurationState
    tc_kelvin: Optional[float] = None
    pressure_raw: Optional[str] = None
    pressure_gpa: Optional[float] = None
    error_type: Optional[ErrorType] = None
    previous_version: Optional[str] = None
    created_at: datetime = field(default_factory=lambda: utcnow_second())
    updated_at: datetime = field(default_factory=lambda: utcnow_second())
    last_editor: Optional[str] = None
    extensions: Mapping[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "record_id": self.record_id,
            "document_id": self.document_id,
            "material_raw": self.material_raw,
            "formula": self.formula,
            "tc_raw": self.tc_raw,
            "tc_kelvin": self.tc_kelvin,
            "pressure_raw": self.pressure_raw,
            "pressure_gpa": self.pressure_gpa,
            "passage_id": self.passage_id,
            "state": self.state.to_json(),
            "error_type": self.error_type.value if self.error_type else None,
            "previous_version": self.previous_version,
            "created_at": format_timestamp(self.created_at),
            "updated_at": format_timestamp(self.updated_at),
            "last_editor": self.last_editor,
            "extensions": dict(self.extensions),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "MaterialRecord":
        return cls(
            record_id=data["record_id"],
            document_id=data["document_id"],
            material_raw=data["material_raw"],
            formula=data["formula"],
            tc_raw=data["tc_raw"],
            tc_kelvin=data.get("tc_kelvin"),
            pressure_raw=data.get("pressure_raw"),
            pressure_gpa=data.get("pressure_gpa"),
            passage_id=data["passage_id"],
            state=CurationState.from_json(data["state"]),
            error_type=ErrorType(data["error_type"]) if data.get("error_type") else None,
            previous_version=data.get("previous_version"),
            created_at=parse_timestamp(data["created_at"]),
            updated_at=parse_timestamp(data["updated_at"]),
            last_editor=data.get("last_editor"),
            extensions=dict(data.get("extensions") or {}),
        )


class ExampleStatus(str, Enum):
    PENDING = "pending"
    SENT = "sent"
    EXPORTED = "exported"
    DELETED = "deleted"


#: Legal forward moves in the training-example lifecycle.
EXAMPLE_TRANSITIONS = {
    ExampleStatus.PENDING: {ExampleStatus.SENT, ExampleStatus.EXPORTED, ExampleStatus.DELETED},
    ExampleStatus.SENT: {ExampleStatus.EXPORTED, ExampleStatus.DELETED},
    ExampleStatus.EXPORTED: set(),
    ExampleStatus.DELETED: set(),
}


@dataclass(frozen=True)
class TrainingExample:
    """A passage snapshot captured when a record was corrected."""

    example_id: str
    document_id: str
    passage_text: str
    spans: tuple[Span, ...]
    layout_tokens: tuple[LayoutToken, ...]
    status: ExampleStatus
    source_record_id: str
    captured_at: datetime

    def __post_init__(self):
        for span in self.spans:
            span.validate_against(self.passage_text)

    def to_json(self) -> dict:
        return {
            "example_id": self.example_id,
            "document_id": self.document_id,
            "passage_text": self.passage_text,
            "spans": [s.to_json() for s in self.spans],
            "layout_tokens": [t.to_json() for t in self.layout_tokens],
            "status": self.status.value,
            "source_record_id": self.source_record_id,
            "captured_at": format_timestamp(self.captured_at),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "TrainingExample":
        return cls(
            example_id=data["example_id"],
            document_id=data["document_id"],
            passage_text=data["passage_text"],
            spans=tuple(Span.from_json(s) for s in data.get("spans", [])),
            layout_tokens=tuple(LayoutToken.from_json(t) for t in data.get("layout_tokens", [])),
            status=ExampleStatus(data["status"]),
            source_record_id=data["source_record_id"],
            captured_at=parse_timestamp(data["captured_at"]),
        )


class ActionKind(str, Enum):
    MARK_VALID = "mark_valid"
    MARK_INVALID = "mark_invalid"
    UPDATE = "update"
    REMOVE = "remove"


@dataclass(frozen=True)
class CurationLogEntry:
    """Append-only trace of one successful curation action."""

    record_id: str
    action: ActionKind
    user: str
    timestamp: datetime
    update_count_after: int
    error_type: Optional[ErrorType] = None
    new_record_id: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "record_id": self.record_id,
            "action": self.action.value,
            "user": self.user,
            "error_type": self.error_type.value if self.error_type else None,
            "timestamp": format_timestamp(self.timestamp),
            "update_count_after": self.update_count_after,
            "new_record_id": self.new_record_id,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "CurationLogEntry":
        return cls(
            record_id=data["record_id"],
            action=ActionKind(data["action"]),
            user=data["user"],
            error_type=ErrorType(data["error_type"]) if data.get("error_type") else None,
            timestamp=parse_timestamp(data["timestamp"]),
            update_count_after=int(data["update_count_after"]),
            new_record_id=data.get("new_record_id"),
        )


@dataclass(frozen=True)
class ProcessingLogEntry:
    """Outcome of one ingestion attempt (or a later capture failure)."""

    document_id: str
    outcome: str  # "ok" | "failed"
    timestamp: datetime
    reason: Optional[str] = None
    passages: int = 0
    records: int = 0

    def __post_init__(self):
        if self.outcome not in ("ok", "failed"):
            raise ValidationError(f"bad processing outcome {self.outcome!r}")
        if self.outcome == "failed" and not self.reason:
            raise ValidationError("failed processing entries need a reason")

    def to_json(self) -> dict:
        return {
            "document_id": self.document_id,
            "outcome": self.outcome,
            "reason": self.reason,
            "counts": {"passages": self.passages, "records": self.records},
            "timestamp": format_timestamp(self.timestamp),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ProcessingLogEntry":
        counts = data.get("counts") or {}
        return cls(
            document_id=data["document_id"],
            outcome=data["outcome"],
            reason=data.get("reason"),
            passages=int(counts.get("passages", 0)),
            records=int(counts.get("records", 0)),
            timestamp=parse_timestamp(data["timestamp"]),
        )


def utcnow_second() -> datetime:
    """Current UTC time truncated to whole seconds."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(raw: str) -> datetime:
    return datetime.strptime(raw, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)


def new_record_id() -> str:
    return uuid.uuid4().hex


def make_record(
    document_id: str,
    material_raw: str,
    formula: str,
    tc_raw: str,
    pressure_raw: Optional[str],
    passage_id: str,
    *,
    record_id: Optional[str] = None,
    now: Optional[datetime] = None,
) -> MaterialRecord:
    """Build a fresh record in state (automatic, new).

    Parsed quantity fields are left unset; filling them in is the parsing
    layer's job.
    """
    if not material_raw:
        raise ValidationError("material_raw must be non-empty")
    if not DOCUMENT_ID_RE.match(document_id):
        raise ValidationError(
            f"document_id {document_id!r} is not a 10-char lowercase hex string"
        )
    ts = now or utcnow_second()
    return MaterialRecord(
        record_id=record_id or new_record_id(),
        document_id=document_id,
        material_raw=material_raw,
        formula=formula,
        tc_raw=tc_raw,
        pressure_raw=pressure_raw,
        passage_id=passage_id,
        state=CurationState(Agent.AUTOMATIC, Status.NEW),
        created_at=ts,
        updated_at=ts,
    )


def is_visible(record: MaterialRecord) -> bool:
    """False for records in an internal status (obsolete, removed)."""
    return record.state.status not in INTERNAL_STATUSES


def with_fields(record: MaterialRecord, **changes: Any) -> MaterialRecord:
    """Return a copy of ``record`` with the given fields replaced."""
    return replace(record, **changes)
