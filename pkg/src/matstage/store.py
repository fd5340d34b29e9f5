"""Embedded, file-backed persistence for records, passages, examples and logs.

One sqlite file, single logical writer, any number of readers. Entities are
stored as canonical JSON bodies with a few extracted columns for filtering
and sorting. All reads exclude internal (obsolete, removed) records unless
a call explicitly asks otherwise.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Optional, Union

from .errors import ConflictError, NotFoundError, ValidationError
from .model import (
    CurationLogEntry,
    ExampleStatus,
    MaterialRecord,
    Passage,
    ProcessingLogEntry,
    Status,
    TrainingExample,
    is_visible,
)

SCHEMA_VERSION = 1

SORT_KEYS = {
    "material": "material_raw",
    "tc_kelvin": "tc_kelvin",
    "pressure_gpa": "pressure_gpa",
    "document_id": "document_id",
    "updated_at": "updated_at",
}

MAX_PAGE_SIZE = 500


@dataclass(frozen=True)
class Query:
    """Filter/sort/pagination parameters for the record table."""

    status: Optional[str] = None
    error_type: Optional[str] = None
    document_id: Optional[str] = None
    material: Optional[str] = None
    tc_min: Optional[float] = None
    tc_max: Optional[float] = None
    pressure_min: Optional[float] = None
    pressure_max: Optional[float] = None
    sort: str = "document_id"
    direction: str = "asc"
    page: int = 1
    size: int = 50

    def __post_init__(self):
        if self.sort not in SORT_KEYS:
            raise ValidationError(f"unknown sort key {self.sort!r}")
        if self.direction not in ("asc", "desc"):
            raise ValidationError(f"direction must be asc or desc, got {self.direction!r}")
        if not 1 <= self.size <= MAX_PAGE_SIZE:
            raise ValidationError(f"page size must be in [1, {MAX_PAGE_SIZE}]")
        if self.page < 1:
            raise ValidationError("page numbers start at 1")
        if self.status is not None and self.status in (s.value for s in (Status.OBSOLETE, Status.REMOVED)):
            raise ValidationError(f"status {self.status!r} is internal and never listed")


@dataclass(frozen=True)
class Page:
    rows: list
    total: int


_SCHEMA = """
CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS documents (
    document_id TEXT PRIMARY KEY,
    page_count INTEGER NOT NULL,
    ingested_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS passages (
    passage_id TEXT PRIMARY KEY,
    document_id TEXT NOT NULL,
    body TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_passages_doc ON passages(document_id);
CREATE TABLE IF NOT EXISTS records (
    record_id TEXT PRIMARY KEY,
    document_id TEXT NOT NULL,
    status TEXT NOT NULL,
    error_type TEXT,
    material_raw TEXT NOT NULL,
    tc_kelvin REAL,
    pressure_gpa REAL,
    updated_at TEXT NOT NULL,
    previous_version TEXT,
    body TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_records_doc ON records(document_id);
CREATE INDEX IF NOT EXISTS idx_records_prev ON records(previous_version);
CREATE TABLE IF NOT EXISTS examples (
    example_id TEXT PRIMARY KEY,
    document_id TEXT NOT NULL,
    status TEXT NOT NULL,
    captured_at TEXT NOT NULL,
    body TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS processing_log (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    document_id TEXT NOT NULL,
    body TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS curation_log (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    record_id TEXT NOT NULL,
    body TEXT NOT NULL
);
"""

_VISIBLE = "status NOT IN ('obsolete', 'removed')"


def _dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class RecordStore:
    """Durable store; safe for one writer and concurrent readers."""

    def __init__(self, path: Union[str, Path] = ":memory:"):
        self.path = str(path)
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._lock = threading.RLock()
        with self._lock, self._conn:
            self._conn.executescript(_SCHEMA)
            self._conn.execute(
                "INSERT OR IGNORE INTO meta (key, value) VALUES ('schema_version', ?)",
                (str(SCHEMA_VERSION),),
            )

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- records ------------------------------------------------------------

    def insert_record(self, record: MaterialRecord) -> None:
        """Store a new record version (put_version semantics)."""
        with self._lock, self._conn:
            if self._get_row("records", "record_id", record.record_id) is not None:
                raise ConflictError(f"record id {record.record_id!r} already exists")
            if record.previous_version is not None:
                prev = self._get_row("records", "record_id", record.previous_version)
                if prev is None:
                    raise ValidationError(
                        f"previous_version {record.previous_version!r} does not exist"
                    )
                successor = self._conn.execute(
                    "SELECT record_id FROM records WHERE previous_version = ?",
                    (record.previous_version,),
                ).fetchone()
                if successor is not None:
                    raise ConflictError(
                        f"record {record.previous_version!r} already has a successor"
                    )
            self._write_record(record, insert=True)

    def update_record(self, record: MaterialRecord) -> None:
        """Replace the stored row for an existing record id (state changes)."""
        with self._lock, self._conn:
            if self._get_row("records", "record_id", record.record_id) is None:
                raise NotFoundError(f"unknown record {record.record_id!r}")
            self._write_record(record, insert=False)

    def _write_record(self, record: MaterialRecord, insert: bool) -> None:
        sql = (
            "INSERT INTO records (record_id, document_id, status, error_type, material_raw,"
            " tc_kelvin, pressure_gpa, updated_at, previous_version, body)"
            " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)"
            if insert
            else "UPDATE records SET document_id=?, status=?, error_type=?, material_raw=?,"
            " tc_kelvin=?, pressure_gpa=?, updated_at=?, previous_version=?, body=?"
            " WHERE record_id=?"
        )
        body = _dumps(record.to_json())
        fields = [
            record.document_id,
            record.state.status.value,
            record.error_type.value if record.error_type else None,
            record.material_raw,
            record.tc_kelvin,
            record.pressure_gpa,
            record.to_json()["updated_at"],
            record.previous_version,
            body,
        ]
        params = [record.record_id, *fields] if insert else [*fields, record.record_id]
        self._conn.execute(sql, params)

    def get_record(self, record_id: str) -> Optional[MaterialRecord]:
        row = self._get_row("records", "record_id", record_id)
        return MaterialRecord.from_json(json.loads(row["body"])) if row else None

    def require_record(self, record_id: str) -> MaterialRecord:
        record = self.get_record(record_id)
        if record is None:
            raise NotFoundError(f"unknown record {record_id!r}")
        return record

    def successor_of(self, record_id: str) -> Optional[MaterialRecord]:
        with self._lock:
            row = self._conn.execute(
                "SELECT body FROM records WHERE previous_version = ?", (record_id,)
            ).fetchone()
        return MaterialRecord.from_json(json.loads(row["body"])) if row else None

    def chain_of(self, record_id: str) -> list[MaterialRecord]:
        """Full version chain containing ``record_id``, oldest first."""
        record = self.require_record(record_id)
        back = [record]
        while back[-1].previous_version is not None:
            back.append(self.require_record(back[-1].previous_version))
        chain = list(reversed(back))
        while True:
            nxt = self.successor_of(chain[-1].record_id)
            if nxt is None:
                return chain
            chain.append(nxt)

    def latest_in_chain(self, record_id: str) -> MaterialRecord:
        return self.chain_of(record_id)[-1]

    def get_latest(self, record_id: str) -> Optional[MaterialRecord]:
        """Latest visible version of the chain, or None when removed."""
        latest = self.latest_in_chain(record_id)
        return latest if is_visible(latest) else None

    def query_records(self, query: Query) -> Page:
        clauses = [_VISIBLE]
        params: list = []
        for column, value in (
            ("status", query.status),
            ("error_type", query.error_type),
            ("document_id", query.document_id),
        ):
            if value is not None:
                clauses.append(f"{column} = ?")
                params.append(value)
        if query.material is not None:
            clauses.append("material_raw LIKE ?")
            params.append(f"%{query.material}%")
        for column, low, high in (
            ("tc_kelvin", query.tc_min, query.tc_max),
            ("pressure_gpa", query.pressure_min, query.pressure_max),
        ):
            if low is not None:
                clauses.append(f"{column} >= ?")
                params.append(low)
            if high is not None:
                clauses.append(f"{column} <= ?")
                params.append(high)
        where = " AND ".join(clauses)
        order_col = SORT_KEYS[query.sort]
        direction = "ASC" if query.direction == "asc" else "DESC"
        order = (
            f"({order_col} IS NULL), {order_col} {direction}, document_id ASC, record_id ASC"
        )
        with self._lock:
            total = self._conn.execute(
                f"SELECT COUNT(*) AS n FROM records WHERE {where}", params
            ).fetchone()["n"]
            rows = self._conn.execute(
                f"SELECT body FROM records WHERE {where} ORDER BY {order} LIMIT ? OFFSET ?",
                [*params, query.size, (query.page - 1) * query.size],
            ).fetchall()
        records = [MaterialRecord.from_json(json.loads(r["body"])) for r in rows]
        return Page(rows=records, total=total)

    def records_for_document(self, document_id: str, include_internal: bool = False) -> list[MaterialRecord]:
        where = "document_id = ?" if include_internal else f"document_id = ? AND {_VISIBLE}"
        with self._lock:
            rows = self._conn.execute(
                f"SELECT body FROM records WHERE {where} ORDER BY record_id", (document_id,)
            ).fetchall()
        return [MaterialRecord.from_json(json.loads(r["body"])) for r in rows]

    def all_visible_records(self) -> list[MaterialRecord]:
        with self._lock:
            rows = self._conn.execute(
                f"SELECT body FROM records WHERE {_VISIBLE} ORDER BY document_id, record_id"
            ).fetchall()
        return [MaterialRecord.from_json(json.loads(r["body"])) for r in rows]

    # -- documents and passages ----------------------------------------------

    def register_document(self, document_id: str, page_count: int, ingested_at: str) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO documents (document_id, page_count, ingested_at) VALUES (?, ?, ?)",
                (document_id, page_count, ingested_at),
            )

    def has_document(self, document_id: str) -> bool:
        return self._get_row("documents", "document_id", document_id) is not None

    def document_ids(self) -> list[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT document_id FROM documents ORDER BY document_id"
            ).fetchall()
        return [r["document_id"] for r in rows]

    def put_passage(self, passage: Passage) -> None:
        with self._lock, self._conn:
            if self._get_row("passages", "passage_id", passage.passage_id) is not None:
                raise ConflictError(f"passage id {passage.passage_id!r} already exists")
            self._conn.execute(
                "INSERT INTO passages (passage_id, document_id, body) VALUES (?, ?, ?)",
                (passage.passage_id, passage.document_id, _dumps(passage.to_json())),
            )

    def get_passage(self, passage_id: str) -> Optional[Passage]:
        row = self._get_row("passages", "passage_id", passage_id)
        return Passage.from_json(json.loads(row["body"])) if row else None

    def passages_for_document(self, document_id: str) -> list[Passage]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT body FROM passages WHERE document_id = ? ORDER BY passage_id",
                (document_id,),
            ).fetchall()
        return [Passage.from_json(json.loads(r["body"])) for r in rows]

    # -- training examples ----------------------------------------------------

    def put_example(self, example: TrainingExample) -> None:
        with self._lock, self._conn:
            if self._get_row("examples", "example_id", example.example_id) is not None:
                raise ConflictError(f"example id {example.example_id!r} already exists")
            self._conn.execute(
                "INSERT INTO examples (example_id, document_id, status, captured_at, body)"
                " VALUES (?, ?, ?, ?, ?)",
                (
                    example.example_id,
                    example.document_id,
                    example.status.value,
                    example.to_json()["captured_at"],
                    _dumps(example.to_json()),
                ),
            )

    def get_example(self, example_id: str) -> Optional[TrainingExample]:
        row = self._get_row("examples", "example_id", example_id)
        return TrainingExample.from_json(json.loads(row["body"])) if row else None

    def update_example(self, example: TrainingExample) -> None:
        with self._lock, self._conn:
            if self._get_row("examples", "example_id", example.example_id) is None:
                raise NotFoundError(f"unknown example {example.example_id!r}")
            self._conn.execute(
                "UPDATE examples SET document_id=?, status=?, captured_at=?, body=?"
                " WHERE example_id=?",
                (
                    example.document_id,
                    example.status.value,
                    example.to_json()["captured_at"],
                    _dumps(example.to_json()),
                    example.example_id,
                ),
            )

    def list_examples(
        self,
        status: Optional[ExampleStatus] = None,
        document_id: Optional[str] = None,
        include_deleted: bool = False,
    ) -> list[TrainingExample]:
        clauses, params = ["1=1"], []
        if status is not None:
            clauses.append("status = ?")
            params.append(status.value)
        elif not include_deleted:
            clauses.append("status != 'deleted'")
        if document_id is not None:
            clauses.append("document_id = ?")
            params.append(document_id)
        with self._lock:
            rows = self._conn.execute(
                f"SELECT body FROM examples WHERE {' AND '.join(clauses)}"
                " ORDER BY captured_at, example_id",
                params,
            ).fetchall()
        return [TrainingExample.from_json(json.loads(r["body"])) for r in rows]

    # -- logs -----------------------------------------------------------------

    def append_processing(self, entry: ProcessingLogEntry) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO processing_log (document_id, body) VALUES (?, ?)",
                (entry.document_id, _dumps(entry.to_json())),
            )

    def append_curation(self, entry: CurationLogEntry) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO curation_log (record_id, body) VALUES (?, ?)",
                (entry.record_id, _dumps(entry.to_json())),
            )

    def read_processing(self, document_id: Optional[str] = None) -> list[ProcessingLogEntry]:
        where, params = ("document_id = ?", [document_id]) if document_id else ("1=1", [])
        with self._lock:
            rows = self._conn.execute(
                f"SELECT body FROM processing_log WHERE {where} ORDER BY seq", params
            ).fetchall()
        return [ProcessingLogEntry.from_json(json.loads(r["body"])) for r in rows]

    def read_curation(
        self,
        record_id: Optional[str] = None,
        user: Optional[str] = None,
    ) -> list[CurationLogEntry]:
        """Curation log in insertion order; a record filter covers its whole chain."""
        clauses, params = ["1=1"], []
        if record_id is not None:
            chain_ids = [r.record_id for r in self.chain_of(record_id)]
            clauses.append(
                f"record_id IN ({','.join('?' * len(chain_ids))})"
            )
            params.extend(chain_ids)
        with self._lock:
            rows = self._conn.execute(
                f"SELECT body FROM curation_log WHERE {' AND '.join(clauses)} ORDER BY seq",
                params,
            ).fetchall()
        entries = [CurationLogEntry.from_json(json.loads(r["body"])) for r in rows]
        if user is not None:
            entries = [e for e in entries if e.user == user]
        return entries

    def count_updates(self, chain_ids: Iterable[str]) -> int:
        ids = list(chain_ids)
        if not ids:
            return 0
        with self._lock:
            rows = self._conn.execute(
                f"SELECT body FROM curation_log WHERE record_id IN ({','.join('?' * len(ids))})",
                ids,
            ).fetchall()
        return sum(1 for r in rows if json.loads(r["body"])["action"] == "update")

    # -- stats, dump and load --------------------------------------------------

    def stats(self) -> dict:
        with self._lock:
            by_status = dict(
                self._conn.execute(
                    "SELECT status, COUNT(*) FROM records GROUP BY status"
                ).fetchall()
            )
            by_error = dict(
                self._conn.execute(
                    "SELECT error_type, COUNT(*) FROM records"
                    " WHERE error_type IS NOT NULL GROUP BY error_type"
                ).fetchall()
            )
            visible = self._conn.execute(
                f"SELECT COUNT(*) AS n FROM records WHERE {_VISIBLE}"
            ).fetchone()["n"]
        return {
            "by_status": {s.value: by_status.get(s.value, 0) for s in Status},
            "by_error_type": by_error,
            "total_visible": visible,
        }

    def dump(self, fp: IO[str]) -> None:
        """Write every entity as newline-delimited JSON, deterministically ordered."""
        with self._lock:
            sections = [
                ("document", "SELECT document_id AS a, page_count AS b, ingested_at AS c"
                             " FROM documents ORDER BY document_id", "doc"),
                ("passage", "SELECT body FROM passages ORDER BY document_id, passage_id", "body"),
                ("record", "SELECT body FROM records ORDER BY record_id", "body"),
                ("example", "SELECT body FROM examples ORDER BY example_id", "body"),
                ("processing_log", "SELECT body FROM processing_log ORDER BY seq", "body"),
                ("curation_log", "SELECT body FROM curation_log ORDER BY seq", "body"),
            ]
            for kind, sql, mode in sections:
                for row in self._conn.execute(sql):
                    if mode == "doc":
                        data = {"document_id": row["a"], "page_count": row["b"], "ingested_at": row["c"]}
                    else:
                        data = json.loads(row["body"])
                    fp.write(_dumps({"kind": kind, "data": data}) + "\n")

    def load(self, fp: IO[str]) -> int:
        """Load a dump into this (empty) store; returns the entity count."""
        with self._lock:
            existing = self._conn.execute("SELECT COUNT(*) AS n FROM records").fetchone()["n"]
            if existing or self.document_ids():
                raise ConflictError("load requires an empty store")
        count = 0
        for line in fp:
            line = line.strip()
            if not line:
                continue
            item = json.loads(line)
            kind, data = item["kind"], item["data"]
            if kind == "document":
                self.register_document(data["document_id"], data["page_count"], data["ingested_at"])
            elif kind == "passage":
                self.put_passage(Passage.from_json(data))
            elif kind == "record":
                self._load_record(MaterialRecord.from_json(data))
            elif kind == "example":
                self.put_example(TrainingExample.from_json(data))
            elif kind == "processing_log":
                self.append_processing(ProcessingLogEntry.from_json(data))
            elif kind == "curation_log":
                self.append_curation(CurationLogEntry.from_json(data))
            else:
                raise ValidationError(f"unknown dump entity kind {kind!r}")
            count += 1
        return count

    def _load_record(self, record: MaterialRecord) -> None:
        # Dumps are ordered by record id, not chain order, so skip the
        # insert-time chain checks and write rows directly.
        with self._lock, self._conn:
            if self._get_row("records", "record_id", record.record_id) is not None:
                raise ConflictError(f"record id {record.record_id!r} already exists")
            self._write_record(record, insert=True)

    def _get_row(self, table: str, key: str, value: str):
        with self._lock:
            return self._conn.execute(
                f"SELECT * FROM {table} WHERE {key} = ?", (value,)
            ).fetchone()
