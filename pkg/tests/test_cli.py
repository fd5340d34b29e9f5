from __future__ import annotations

import json

import pytest

from matstage.cli import main

from conftest import document_payload


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParse:
    def test_formula_lines(self, capsys, tmp_path):
        infile = tmp_path / "formulas.txt"
        infile.write_text("MgB2\nBa1-xKxFe2As2\n???\n", encoding="utf-8")
        code, out, _ = run(capsys, "parse", "--input", str(infile))
        assert code == 0
        lines = [json.loads(line) for line in out.strip().splitlines()]
        assert [l["outcome"] for l in lines] == ["resolved", "unresolved", "parse_error"]
        assert lines[0]["input"] == "MgB2"
        assert lines[0]["elements"] == {"B": 2.0, "Mg": 1.0}
        assert lines[1]["variables"] == ["x"]

    def test_temperature_kind(self, capsys, tmp_path):
        infile = tmp_path / "temps.txt"
        infile.write_text("39 K\n1.5 mK\n41]\n", encoding="utf-8")
        code, out, _ = run(capsys, "parse", "--kind", "temperature",
                           "--input", str(infile))
        assert code == 0
        lines = [json.loads(line) for line in out.strip().splitlines()]
        assert lines[0]["details"]["magnitude"] == 39.0
        assert lines[1]["details"]["magnitude"] == 0.0015
        assert lines[2]["outcome"] == "error"


class TestScore:
    def test_bundled_fixture_by_method(self, capsys):
        code, out, _ = run(capsys, "score", "--group", "method")
        assert code == 0
        assert "method=pdf" in out
        assert "P=87.83 R=45.61 F1=52.67" in out
        assert "method=interface" in out
        assert "P=93.38 R=92.51 F1=92.02" in out
        assert "consistent=23" in out

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "score", "--group", "curator,method",
                           "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert len(report["groups"]) == 6
        assert report["rows"] == 30
        assert any("0454e07f64" in m and "impossible" in m
                   for m in report["mismatches"])

    def test_custom_input(self, capsys, tmp_path):
        path = tmp_path / "eval.csv"
        path.write_text(
            "document_id,pages,method,curator,tp,fp,fn\n"
            "0123456789,4,I,SR,6,0,0\n",
            encoding="utf-8",
        )
        code, out, _ = run(capsys, "score", "--input", str(path))
        assert code == 0
        assert "P=100.00 R=100.00 F1=100.00" in out


class TestStoreCommands:
    def test_ingest_scan_export_dump_load(self, capsys, tmp_path):
        store = tmp_path / "store.db"
        batch = tmp_path / "batch.jsonl"
        payloads = [
            document_payload(candidates=[
                {"material_raw": "MgB2", "formula": "MgB2", "tc_raw": "500 K",
                 "passage_id": "0aa1b3161f-p1"}]),
            document_payload(document_id="02c4f00127", page_count=101),
        ]
        batch.write_text("\n".join(json.dumps(p) for p in payloads), encoding="utf-8")

        code, out, _ = run(capsys, "ingest", str(batch), "--store", str(store),
                           "--keep-going")
        assert code == 0
        outcomes = [json.loads(line)["outcome"] for line in out.strip().splitlines()]
        assert outcomes == ["ok", "failed"]

        code, out, _ = run(capsys, "scan", "--store", str(store))
        assert code == 0
        report = json.loads(out)
        assert report["counts"]["tc_invalid"] == 1
        assert len(report["transitioned"]) == 1

        # correct the record through the engine, then export training data
        from matstage.collector import TrainingCollector
        from matstage.model import ActionKind, ErrorType
        from matstage.store import RecordStore
        from matstage.workflow import CurationAction, CurationEngine

        db = RecordStore(store)
        engine = CurationEngine(db, TrainingCollector(db))
        engine.apply_action(report["transitioned"][0], CurationAction(
            ActionKind.UPDATE, "alice", error_type=ErrorType.EXTRACTION,
            payload={"tc_raw": "39 K"}))
        db.close()

        out_path = tmp_path / "training.json"
        code, _, _ = run(capsys, "export-training", "--store", str(store),
                         "--status", "pending", "--out", str(out_path))
        assert code == 0
        exported = json.loads(out_path.read_text(encoding="utf-8"))
        assert len(exported) == 1

        dump_path = tmp_path / "dump.jsonl"
        code, _, _ = run(capsys, "dump", "--store", str(store), "--out", str(dump_path))
        assert code == 0

        other = tmp_path / "other.db"
        code, out, _ = run(capsys, "load", str(dump_path), "--store", str(other))
        assert code == 0
        assert "loaded" in out

        first = dump_path.read_text(encoding="utf-8")
        code, second, _ = run(capsys, "dump", "--store", str(other))
        assert second == first

    def test_ingest_without_store_fails(self, capsys, tmp_path, monkeypatch):
        monkeypatch.delenv("MATSTAGE_STORE", raising=False)
        batch = tmp_path / "x.json"
        batch.write_text("{}", encoding="utf-8")
        code, _, err = run(capsys, "ingest", str(batch))
        assert code == 2
        assert "no store path" in err
