"""HTTP facade over the store, workflow, scanner, collector and logs.

JSON in, JSON out. Domain errors map to stable transport codes:
not_found 404, validation 400, conflict and stale_version 409,
forbidden_transition 422. When an auth token is configured, every request
must carry it in the X-Auth-Token header; curator identity always travels
in the request body as ``user``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse

from .anomaly import AnomalyScanner, detect_multi_tc
from .collector import TrainingCollector
from .errors import NotFoundError, StagingError, ValidationError
from .ingest import Ingestor
from .model import ActionKind, ErrorType, ExampleStatus
from .store import Query, RecordStore
from .workflow import CurationAction, CurationEngine, allowed_actions

STATUS_CODES = {
    "not_found": 404,
    "validation": 400,
    "conflict": 409,
    "stale_version": 409,
    "forbidden_transition": 422,
}


@dataclass
class ServiceConfig:
    store_path: str = ":memory:"
    host: str = "127.0.0.1"
    port: int = 8787
    auth_token: Optional[str] = None
    double_round: bool = False

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        return cls(
            store_path=os.environ.get("MATSTAGE_STORE", ":memory:"),
            host=os.environ.get("MATSTAGE_HOST", "127.0.0.1"),
            port=int(os.environ.get("MATSTAGE_PORT", "8787")),
            auth_token=os.environ.get("MATSTAGE_TOKEN") or None,
            double_round=os.environ.get("MATSTAGE_DOUBLE_ROUND", "") == "1",
        )


def _record_json(record) -> dict:
    data = record.to_json()
    data["allowed_actions"] = sorted(a.value for a in allowed_actions(record.state))
    return data


def _parse_error_type(raw: Optional[str], required: bool) -> Optional[ErrorType]:
    if raw is None or raw == "":
        if required:
            raise ValidationError("error_type is required for this action")
        return None
    try:
        return ErrorType(raw)
    except ValueError:
        raise ValidationError(f"unknown error_type {raw!r}")


def create_app(engine: CurationEngine, auth_token: Optional[str] = None) -> FastAPI:
    """Build the service around an already-wired engine."""
    store = engine.store
    collector = engine.collector
    scanner = AnomalyScanner(engine)
    ingestor = Ingestor(store, clock=engine.clock, id_factory=engine.id_factory)
    app = FastAPI(title="matstage", docs_url=None, redoc_url=None)

    def check_auth(x_auth_token: Optional[str] = Header(default=None)):
        if auth_token and x_auth_token != auth_token:
            raise HTTPException(status_code=401, detail="missing or bad auth token")

    guarded = [Depends(check_auth)]

    @app.exception_handler(StagingError)
    async def staging_error_handler(_request: Request, exc: StagingError):
        return JSONResponse(
            status_code=STATUS_CODES.get(exc.code, 400),
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    # -- records ---------------------------------------------------------------

    @app.get("/records", dependencies=guarded)
    def list_records(
        status: Optional[str] = None,
        error_type: Optional[str] = None,
        document_id: Optional[str] = None,
        material: Optional[str] = None,
        tc_min: Optional[float] = None,
        tc_max: Optional[float] = None,
        pressure_min: Optional[float] = None,
        pressure_max: Optional[float] = None,
        sort: str = "document_id",
        direction: str = "asc",
        page: int = 1,
        size: int = 50,
    ):
        result = store.query_records(
            Query(
                status=status,
                error_type=error_type,
                document_id=document_id,
                material=material,
                tc_min=tc_min,
                tc_max=tc_max,
                pressure_min=pressure_min,
                pressure_max=pressure_max,
                sort=sort,
                direction=direction,
                page=page,
                size=size,
            )
        )
        return {"rows": [_record_json(r) for r in result.rows], "total": result.total}

    @app.get("/records/{record_id}", dependencies=guarded)
    def get_record(record_id: str):
        store.require_record(record_id)
        latest = store.get_latest(record_id)
        if latest is None:
            raise NotFoundError(f"record chain of {record_id!r} has been removed")
        return _record_json(latest)

    @app.get("/records/{record_id}/history", dependencies=guarded)
    def get_history(record_id: str):
        return [
            {
                "record": _record_json(record),
                "log": [entry.to_json() for entry in entries],
            }
            for record, entries in engine.history(record_id)
        ]

    def _apply(record_id: str, kind: ActionKind, body: dict):
        user = body.get("user") or ""
        error_type = _parse_error_type(
            body.get("error_type"), required=kind in (ActionKind.UPDATE, ActionKind.REMOVE)
        )
        action = CurationAction(
            kind=kind,
            user=user,
            error_type=error_type,
            payload=body.get("payload") or {},
        )
        outcome = engine.apply_action(record_id, action)
        return {
            "new_state": outcome.new_state.to_json(),
            "new_record_id": outcome.new_record_id,
            "training_captured": outcome.training_captured,
        }

    @app.post("/records/{record_id}/mark-valid", dependencies=guarded)
    def mark_valid(record_id: str, body: dict):
        return _apply(record_id, ActionKind.MARK_VALID, body)

    @app.post("/records/{record_id}/mark-invalid", dependencies=guarded)
    def mark_invalid(record_id: str, body: dict):
        return _apply(record_id, ActionKind.MARK_INVALID, body)

    @app.post("/records/{record_id}/update", dependencies=guarded)
    def update_record(record_id: str, body: dict):
        return _apply(record_id, ActionKind.UPDATE, body)

    @app.post("/records/{record_id}/remove", dependencies=guarded)
    def remove_record(record_id: str, body: dict):
        return _apply(record_id, ActionKind.REMOVE, body)

    # -- scanning ----------------------------------------------------------------

    @app.post("/scan", dependencies=guarded)
    def run_scan(body: Optional[dict] = None):
        body = body or {}
        if body.get("document"):
            report = scanner.scan_document(body["document"])
        elif body.get("status"):
            report = scanner.scan_status(body["status"])
        else:
            report = scanner.scan_all()
        return report.to_json()

    @app.get("/anomalies/multi-tc", dependencies=guarded)
    def multi_tc():
        groups = detect_multi_tc(store.all_visible_records())
        return [g.to_json() for g in groups]

    # -- documents ----------------------------------------------------------------

    @app.get("/documents/{document_id}", dependencies=guarded)
    def get_document(document_id: str):
        if not store.has_document(document_id):
            raise NotFoundError(f"unknown document {document_id!r}")
        return {
            "document_id": document_id,
            "passages": [p.to_json() for p in store.passages_for_document(document_id)],
            "records": [_record_json(r) for r in store.records_for_document(document_id)],
        }

    @app.post("/ingest", dependencies=guarded)
    def ingest(body: dict):
        return ingestor.ingest(body).to_json()

    # -- logs ------------------------------------------------------------------------

    @app.get("/logs/processing", dependencies=guarded)
    def processing_log(document_id: Optional[str] = None):
        return [e.to_json() for e in store.read_processing(document_id)]

    @app.get("/logs/curation", dependencies=guarded)
    def curation_log(record_id: Optional[str] = None, user: Optional[str] = None):
        return [e.to_json() for e in store.read_curation(record_id, user)]

    # -- training data -----------------------------------------------------------------

    @app.get("/training", dependencies=guarded)
    def list_training(
        status: Optional[str] = None,
        document_id: Optional[str] = None,
        include_deleted: bool = False,
    ):
        parsed = ExampleStatus(status) if status else None
        examples = collector.list_examples(parsed, document_id, include_deleted)
        return [e.to_json() for e in examples]

    @app.post("/training/{example_id}/mark-sent", dependencies=guarded)
    def mark_sent(example_id: str):
        return collector.mark_sent(example_id).to_json()

    @app.delete("/training/{example_id}", dependencies=guarded)
    def delete_training(example_id: str):
        collector.delete_example(example_id)
        return {"deleted": example_id}

    @app.get("/training/export", dependencies=guarded)
    def export_training(status: Optional[str] = None, document_id: Optional[str] = None):
        parsed = ExampleStatus(status) if status else None
        return collector.export_examples(status=parsed, document_id=document_id)

    @app.get("/stats", dependencies=guarded)
    def stats():
        return store.stats()

    return app


def build_engine(config: ServiceConfig) -> CurationEngine:
    store = RecordStore(config.store_path)
    collector = TrainingCollector(store)
    return CurationEngine(store, collector, double_round=config.double_round)


def serve(config: Optional[ServiceConfig] = None) -> None:
    """Run the service until interrupted; in-flight requests drain on shutdown."""
    import uvicorn

    config = config or ServiceConfig.from_env()
    engine = build_engine(config)
    app = create_app(engine, auth_token=config.auth_token)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
