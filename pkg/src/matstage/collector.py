"""Training-data collection.

Every update or removal snapshots the source passage (text, entity spans,
layout tokens) as a pending training example. Examples then move forward
through pending -> sent -> exported, or get deleted before export.
"""

from __future__ import annotations

import uuid
from datetime import datetime
from typing import Callable, Iterable, Optional

from .errors import ConflictError, NotFoundError, ValidationError
from .model import (
    ActionKind,
    EXAMPLE_TRANSITIONS,
    ExampleStatus,
    MaterialRecord,
    ProcessingLogEntry,
    TrainingExample,
    format_timestamp,
    utcnow_second,
)
from .store import RecordStore


class CaptureError(ValidationError):
    pass


class TrainingCollector:
    def __init__(
        self,
        store: RecordStore,
        *,
        clock: Callable[[], datetime] = utcnow_second,
        id_factory: Callable[[], str] = lambda: uuid.uuid4().hex,
    ):
        self.store = store
        self.clock = clock
        self.id_factory = id_factory

    def capture(
        self, record: MaterialRecord, kind: ActionKind, now: Optional[datetime] = None
    ) -> TrainingExample:
        """Snapshot the record's source passage as a pending example."""
        if kind not in (ActionKind.UPDATE, ActionKind.REMOVE):
            raise CaptureError(f"no training capture for action {kind.value}")
        passage = self.store.get_passage(record.passage_id)
        if passage is None:
            raise CaptureError(
                f"record {record.record_id!r} references missing passage "
                f"{record.passage_id!r}"
            )
        example = TrainingExample(
            example_id=self.id_factory(),
            document_id=record.document_id,
            passage_text=passage.text,
            spans=passage.spans,
            layout_tokens=passage.layout_tokens,
            status=ExampleStatus.PENDING,
            source_record_id=record.record_id,
            captured_at=now or self.clock(),
        )
        self.store.put_example(example)
        return example

    def capture_safe(
        self, record: MaterialRecord, kind: ActionKind, now: Optional[datetime] = None
    ) -> bool:
        """Capture, logging failures to the processing log instead of raising.

        The curation action that triggered the capture succeeds either way.
        """
        try:
            self.capture(record, kind, now)
            return True
        except CaptureError as exc:
            self.store.append_processing(
                ProcessingLogEntry(
                    document_id=record.document_id,
                    outcome="failed",
                    reason=f"capture_failed: {exc.message}",
                    timestamp=now or self.clock(),
                )
            )
            return False

    def list_examples(
        self,
        status: Optional[ExampleStatus] = None,
        document_id: Optional[str] = None,
        include_deleted: bool = False,
    ) -> list[TrainingExample]:
        return self.store.list_examples(status, document_id, include_deleted)

    def mark_sent(self, example_id: str) -> TrainingExample:
        return self._move(example_id, ExampleStatus.SENT)

    def delete_example(self, example_id: str) -> None:
        self._move(example_id, ExampleStatus.DELETED)

    def export_examples(
        self,
        ids: Optional[Iterable[str]] = None,
        status: Optional[ExampleStatus] = None,
        document_id: Optional[str] = None,
    ) -> list[dict]:
        """Build the interchange document and mark fresh examples exported.

        Selection is by explicit ids or by filter; deleted examples are never
        exported. Re-exporting already-exported examples yields identical
        content and changes nothing.
        """
        if ids is not None:
            examples = []
            for example_id in ids:
                example = self.store.get_example(example_id)
                if example is None:
                    raise NotFoundError(f"unknown example {example_id!r}")
                if example.status != ExampleStatus.DELETED:
                    examples.append(example)
            examples.sort(key=lambda e: (format_timestamp(e.captured_at), e.example_id))
        else:
            examples = self.list_examples(status=status, document_id=document_id)
            examples = [e for e in examples if e.status != ExampleStatus.DELETED]
        document = []
        for example in examples:
            document.append(
                {
                    "document_id": example.document_id,
                    "text": example.passage_text,
                    "spans": [
                        {"start": s.start, "end": s.end, "label": s.label.value}
                        for s in example.spans
                    ],
                    "layout_tokens": [t.to_json() for t in example.layout_tokens],
                    "source_record_id": example.source_record_id,
                    "captured_at": format_timestamp(example.captured_at),
                }
            )
            if example.status != ExampleStatus.EXPORTED:
                self._move(example.example_id, ExampleStatus.EXPORTED)
        return document

    def _move(self, example_id: str, target: ExampleStatus) -> TrainingExample:
        example = self.store.get_example(example_id)
        if example is None:
            raise NotFoundError(f"unknown example {example_id!r}")
        if target not in EXAMPLE_TRANSITIONS[example.status]:
            raise ConflictError(
                f"example {example_id!r} cannot move {example.status.value} -> {target.value}"
            )
        moved = TrainingExample(
            example_id=example.example_id,
            document_id=example.document_id,
            passage_text=example.passage_text,
            spans=example.spans,
            layout_tokens=example.layout_tokens,
            status=target,
            source_record_id=example.source_record_id,
            captured_at=example.captured_at,
        )
        self.store.update_example(moved)
        return moved
