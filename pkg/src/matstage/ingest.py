"""Ingestion of upstream extraction output.

Each payload is one document: passages with entity spans and layout tokens,
plus candidate records referencing those passages. Ingestion is all or
nothing per document and always leaves exactly one processing log entry,
so the log can explain any document that is missing from the table.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence, Union

from .errors import NotFoundError, ValidationError
from .model import (
    DOCUMENT_ID_RE,
    EntityLabel,
    LayoutToken,
    Passage,
    ProcessingLogEntry,
    Span,
    format_timestamp,
    make_record,
    utcnow_second,
    with_fields,
)
from .parsing import try_parse_pressure, try_parse_temperature
from .store import RecordStore

MAX_PAGE_COUNT = 100


@dataclass(frozen=True)
class CandidateRecord:
    material_raw: str
    formula: str
    tc_raw: str
    passage_id: str
    pressure_raw: Optional[str] = None


@dataclass(frozen=True)
class ExtractionPayload:
    document_id: str
    page_count: int
    passages: tuple[Passage, ...]
    candidates: tuple[CandidateRecord, ...] = ()


class PayloadError(ValidationError):
    """Schema violation in an extraction payload."""


def _require(data: Mapping, key: str, kind, where: str):
    if key not in data:
        raise PayloadError(f"{where}: missing field {key!r}")
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise PayloadError(f"{where}: field {key!r} has wrong type")
    return value


def parse_payload(data: Mapping) -> ExtractionPayload:
    """Validate raw JSON into an ExtractionPayload; raises PayloadError."""
    if not isinstance(data, Mapping):
        raise PayloadError("payload must be a JSON object")
    document_id = _require(data, "document_id", str, "payload")
    if not DOCUMENT_ID_RE.match(document_id):
        raise PayloadError(f"bad document_id {document_id!r}")
    page_count = _require(data, "page_count", int, "payload")
    raw_passages = _require(data, "passages", list, "payload")
    passages = []
    seen_passage_ids = set()
    for i, raw in enumerate(raw_passages):
        where = f"passages[{i}]"
        passage_id = _require(raw, "passage_id", str, where)
        if passage_id in seen_passage_ids:
            raise PayloadError(f"{where}: duplicate passage_id {passage_id!r}")
        seen_passage_ids.add(passage_id)
        text = _require(raw, "text", str, where)
        spans = []
        for j, s in enumerate(raw.get("spans", [])):
            sw = f"{where}.spans[{j}]"
            start = _require(s, "start", int, sw)
            end = _require(s, "end", int, sw)
            label_raw = _require(s, "label", str, sw)
            try:
                label = EntityLabel(label_raw)
            except ValueError:
                raise PayloadError(f"{sw}: unknown label {label_raw!r}")
            if not (0 <= start < end <= len(text)):
                raise PayloadError(f"{sw}: offsets out of bounds")
            spans.append(Span(start, end, label, text[start:end]))
        tokens = []
        for j, t in enumerate(raw.get("layout_tokens", [])):
            tw = f"{where}.layout_tokens[{j}]"
            try:
                tokens.append(LayoutToken.from_json(t))
            except (KeyError, TypeError, ValueError):
                raise PayloadError(f"{tw}: malformed layout token")
        try:
            passages.append(
                Passage(passage_id, document_id, text, tuple(spans), tuple(tokens))
            )
        except ValidationError as exc:
            raise PayloadError(f"{where}: {exc.message}")
    candidates = []
    for i, raw in enumerate(data.get("candidate_records", [])):
        where = f"candidate_records[{i}]"
        candidate = CandidateRecord(
            material_raw=_require(raw, "material_raw", str, where),
            formula=_require(raw, "formula", str, where),
            tc_raw=_require(raw, "tc_raw", str, where),
            passage_id=_require(raw, "passage_id", str, where),
            pressure_raw=raw.get("pressure_raw"),
        )
        if not candidate.material_raw:
            raise PayloadError(f"{where}: material_raw is empty")
        if candidate.passage_id not in seen_passage_ids:
            raise PayloadError(
                f"{where}: references unknown passage {candidate.passage_id!r}"
            )
        candidates.append(candidate)
    return ExtractionPayload(document_id, page_count, tuple(passages), tuple(candidates))


class Ingestor:
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

    def ingest(self, data: Mapping) -> ProcessingLogEntry:
        """Ingest one document payload; always appends one log entry."""
        now = self.clock()

        def fail(document_id: str, reason: str) -> ProcessingLogEntry:
            entry = ProcessingLogEntry(
                document_id=document_id, outcome="failed", reason=reason, timestamp=now
            )
            self.store.append_processing(entry)
            return entry

        try:
            payload = parse_payload(data)
        except PayloadError as exc:
            document_id = data.get("document_id", "?") if isinstance(data, Mapping) else "?"
            return fail(str(document_id), f"schema: {exc.message}")

        if self.store.has_document(payload.document_id):
            return fail(payload.document_id, "duplicate")
        if payload.page_count > MAX_PAGE_COUNT:
            return fail(payload.document_id, "too_big")
        if not payload.passages or all(not p.text.strip() for p in payload.passages):
            return fail(payload.document_id, "no_text")
        collisions = [
            p.passage_id
            for p in payload.passages
            if self.store.get_passage(p.passage_id) is not None
        ]
        if collisions:
            # Checked up front so a failed ingest never leaves partial data.
            return fail(
                payload.document_id,
                f"schema: passage ids already in use: {', '.join(collisions)}",
            )

        records = []
        for candidate in payload.candidates:
            record = make_record(
                payload.document_id,
                candidate.material_raw,
                candidate.formula,
                candidate.tc_raw,
                candidate.pressure_raw,
                candidate.passage_id,
                record_id=self.id_factory(),
                now=now,
            )
            records.append(
                with_fields(
                    record,
                    tc_kelvin=try_parse_temperature(record.tc_raw),
                    pressure_gpa=try_parse_pressure(record.pressure_raw),
                )
            )
        # All checks passed; persist everything, then the log entry.
        self.store.register_document(
            payload.document_id, payload.page_count, format_timestamp(now)
        )
        for passage in payload.passages:
            self.store.put_passage(passage)
        for record in records:
            self.store.insert_record(record)
        entry = ProcessingLogEntry(
            document_id=payload.document_id,
            outcome="ok",
            passages=len(payload.passages),
            records=len(records),
            timestamp=now,
        )
        self.store.append_processing(entry)
        return entry

    def ingest_batch(self, path: Union[str, Path]) -> list[ProcessingLogEntry]:
        """Ingest a .json/.jsonl file or a directory of them.

        Failures are logged per payload and never abort the batch.
        """
        target = Path(path)
        if not target.exists():
            raise NotFoundError(f"no such path: {target}")
        files: Sequence[Path]
        if target.is_dir():
            files = sorted(
                p for p in target.iterdir() if p.suffix in (".json", ".jsonl")
            )
        else:
            files = [target]
        entries = []
        for file in files:
            text = file.read_text(encoding="utf-8").strip()
            if not text:
                continue
            if file.suffix == ".jsonl":
                payloads = [json.loads(line) for line in text.splitlines() if line.strip()]
            else:
                loaded = json.loads(text)
                payloads = loaded if isinstance(loaded, list) else [loaded]
            for payload in payloads:
                entries.append(self.ingest(payload))
        return entries
