"""Command-line entry points.

Subcommands: ingest, scan, parse, score, export-training, dump, load, serve.
The store path comes from --store or the MATSTAGE_STORE environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .anomaly import AnomalyScanner
from .api import ServiceConfig, build_engine, serve
from .collector import TrainingCollector
from .errors import StagingError
from .ingest import Ingestor
from .metrics import (
    bundled_eval_table_path,
    load_eval_table,
    round_half_up,
    score_report,
)
from .model import ExampleStatus
from .parsing import (
    QuantityParseError,
    parse_composition,
    parse_pressure,
    parse_temperature,
)
from .store import RecordStore
from .workflow import CurationEngine


def _store_path(args) -> str:
    path = args.store or os.environ.get("MATSTAGE_STORE")
    if not path:
        raise StagingError("no store path; pass --store or set MATSTAGE_STORE")
    return path


def _open_engine(args) -> CurationEngine:
    store = RecordStore(_store_path(args))
    return CurationEngine(store, TrainingCollector(store))


def cmd_ingest(args) -> int:
    store = RecordStore(_store_path(args))
    entries = Ingestor(store).ingest_batch(args.path)
    for entry in entries:
        print(json.dumps(entry.to_json(), sort_keys=True))
    failures = sum(1 for e in entries if e.outcome == "failed")
    return 1 if failures and not args.keep_going else 0


def cmd_scan(args) -> int:
    engine = _open_engine(args)
    scanner = AnomalyScanner(engine)
    if args.document:
        report = scanner.scan_document(args.document)
    elif args.status:
        report = scanner.scan_status(args.status)
    else:
        report = scanner.scan_all()
    print(json.dumps(report.to_json(), sort_keys=True, indent=2))
    return 0


def cmd_parse(args) -> int:
    source = open(args.input, encoding="utf-8") if args.input else sys.stdin
    try:
        for line in source:
            raw = line.rstrip("\n")
            if not raw.strip():
                continue
            print(json.dumps(_parse_one(args.kind, raw), ensure_ascii=False))
    finally:
        if args.input:
            source.close()
    return 0


def _parse_one(kind: str, raw: str) -> dict:
    if kind == "formula":
        return {"input": raw, **parse_composition(raw).to_json()}
    parser = parse_temperature if kind == "temperature" else parse_pressure
    try:
        quantity = parser(raw)
    except QuantityParseError as exc:
        return {"input": raw, "outcome": "error", "details": {"reason": exc.reason}}
    return {
        "input": raw,
        "outcome": "ok",
        "details": {"magnitude": quantity.magnitude, "unit": quantity.unit.value},
    }


def cmd_score(args) -> int:
    path = args.input or bundled_eval_table_path()
    rows = load_eval_table(path)
    keys = [k.strip() for k in args.group.split(",") if k.strip()] if args.group else []
    report = score_report(rows, keys)
    if args.format == "json":
        print(json.dumps(report, indent=2))
    elif args.format == "csv":
        columns = list(report["groups"][0].keys()) if report["groups"] else []
        print(",".join(columns))
        for group in report["groups"]:
            print(",".join(str(group[c]) for c in columns))
    else:
        for group in report["groups"]:
            label = " ".join(
                f"{k}={group[k]}" for k in group if k in ("curator", "method")
            ) or "all rows"
            print(
                f"{label}: P={group['precision']:.2f} R={group['recall']:.2f} "
                f"F1={group['f1']:.2f} docs={group['docs']} pages={group['pages']}"
            )
        print(
            f"rows={report['rows']} consistent={report['consistent_rows']} "
            f"elapsed={round_half_up(report['elapsed_seconds'], 2)}s"
        )
        for line in report["mismatches"]:
            print(f"mismatch: {line}")
    return 0


def cmd_export_training(args) -> int:
    store = RecordStore(_store_path(args))
    collector = TrainingCollector(store)
    status = ExampleStatus(args.status) if args.status else None
    document = collector.export_examples(status=status, document_id=args.document)
    payload = json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(payload + "\n")
    else:
        print(payload)
    return 0


def cmd_dump(args) -> int:
    store = RecordStore(_store_path(args))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            store.dump(fp)
    else:
        store.dump(sys.stdout)
    return 0


def cmd_load(args) -> int:
    store = RecordStore(_store_path(args))
    with open(args.infile, encoding="utf-8") as fp:
        count = store.load(fp)
    print(f"loaded {count} entities")
    return 0


def cmd_serve(args) -> int:
    config = ServiceConfig.from_env()
    if args.store:
        config.store_path = args.store
    if args.port:
        config.port = args.port
    if args.host:
        config.host = args.host
    if args.token:
        config.auth_token = args.token
    if args.double_round:
        config.double_round = True
    serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matstage",
        description="Staging area for machine-extracted superconductor records",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--store", help="path to the sqlite store")
        return p

    p = add("ingest", cmd_ingest, "ingest extraction payloads (.json/.jsonl file or directory)")
    p.add_argument("path")
    p.add_argument("--keep-going", action="store_true",
                   help="exit 0 even when some payloads fail")

    p = add("scan", cmd_scan, "run anomaly detection and invalidate offenders")
    scope = p.add_mutually_exclusive_group()
    scope.add_argument("--all", action="store_true", help="scan every visible record (default)")
    scope.add_argument("--document", help="scan one document's records")
    scope.add_argument("--status", help="scan records with this status")

    p = add("parse", cmd_parse, "parse newline-delimited values to JSON lines")
    p.add_argument("--kind", choices=["formula", "temperature", "pressure"],
                   default="formula")
    p.add_argument("--input", help="read from this file instead of stdin")

    p = add("score", cmd_score, "compute precision/recall/F1 from an evaluation CSV")
    p.add_argument("--input", help="evaluation CSV (default: bundled fixture)")
    p.add_argument("--group", help="comma-separated grouping keys: curator,method")
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")

    p = add("export-training", cmd_export_training, "export training examples as JSON")
    p.add_argument("--status", choices=[s.value for s in ExampleStatus])
    p.add_argument("--document", help="restrict to one document id")
    p.add_argument("--out", help="write to this path instead of stdout")

    p = add("dump", cmd_dump, "dump all entities as newline-delimited JSON")
    p.add_argument("--out", help="write to this path instead of stdout")

    p = add("load", cmd_load, "load a dump into an empty store")
    p.add_argument("infile")

    p = add("serve", cmd_serve, "run the HTTP service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--token", help="require this X-Auth-Token header")
    p.add_argument("--double-round", action="store_true",
                   help="require second-round validation by a different user")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except StagingError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
