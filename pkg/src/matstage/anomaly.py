"""Rule-based anomaly screening for incoming records.

Three record-level rules: the critical temperature must parse and sit inside
[0, 273] K, the applied pressure (when present) must parse and sit inside
[0, 250] GPa, and the formula must be processable by the composition parser.
Offenders are marked (automatic, invalid) with error type anomaly_detection.
A fourth, group-level check reports materials linked to several distinct
T_c values within one document; it reports only and never changes status,
since conflicting values are for a curator to arbitrate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import StagingError
from .model import MaterialRecord, Status, is_visible
from .parsing import (
    CompositionOutcome,
    QuantityParseError,
    normalize_formula,
    parse_composition,
    parse_pressure,
    parse_temperature,
)
from .workflow import CurationEngine

TC_MAX_KELVIN = 273.0
PRESSURE_MAX_GPA = 250.0
VALUE_TOLERANCE = 1e-9


class AnomalyRule(str, Enum):
    TC_INVALID = "tc_invalid"
    FORMULA_UNPROCESSABLE = "formula_unprocessable"
    PRESSURE_INVALID = "pressure_invalid"
    MULTI_TC = "multi_tc"


@dataclass(frozen=True)
class AnomalyFlag:
    rule: AnomalyRule
    detail: str


#: Rules that mark a record invalid; multi_tc is report-only.
MARKING_RULES = (
    AnomalyRule.TC_INVALID,
    AnomalyRule.FORMULA_UNPROCESSABLE,
    AnomalyRule.PRESSURE_INVALID,
)


def check_record(record: MaterialRecord) -> list[AnomalyFlag]:
    """Pure rule evaluation; boundary values themselves are not anomalous."""
    flags: list[AnomalyFlag] = []
    try:
        tc = parse_temperature(record.tc_raw).magnitude
    except QuantityParseError as exc:
        flags.append(AnomalyFlag(AnomalyRule.TC_INVALID, f"unparseable: {exc.reason}"))
    else:
        if tc < 0:
            flags.append(AnomalyFlag(AnomalyRule.TC_INVALID, f"negative value {tc} K"))
        elif tc > TC_MAX_KELVIN:
            flags.append(
                AnomalyFlag(AnomalyRule.TC_INVALID, f"{tc} K above {TC_MAX_KELVIN} K")
            )
    if record.pressure_raw is not None and record.pressure_raw != "":
        try:
            pressure = parse_pressure(record.pressure_raw).magnitude
        except QuantityParseError as exc:
            flags.append(
                AnomalyFlag(AnomalyRule.PRESSURE_INVALID, f"unparseable: {exc.reason}")
            )
        else:
            if pressure < 0 or pressure > PRESSURE_MAX_GPA:
                flags.append(
                    AnomalyFlag(
                        AnomalyRule.PRESSURE_INVALID,
                        f"{pressure} GPa outside [0, {PRESSURE_MAX_GPA}]",
                    )
                )
    composition = parse_composition(record.formula)
    if composition.outcome == CompositionOutcome.PARSE_ERROR:
        flags.append(
            AnomalyFlag(AnomalyRule.FORMULA_UNPROCESSABLE, composition.reason)
        )
    return flags


@dataclass(frozen=True)
class MultiTcGroup:
    document_id: str
    material: str
    values: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "document_id": self.document_id,
            "material": self.material,
            "values": list(self.values),
        }


def detect_multi_tc(records: Iterable[MaterialRecord]) -> list[MultiTcGroup]:
    """Materials carrying two or more distinct T_c values within a document.

    Records whose T_c does not parse are skipped here; the record-level rule
    already covers them. Cross-document variation is legitimate physics and
    never grouped together.
    """
    groups: dict[tuple[str, str], list[float]] = {}
    for record in records:
        if not is_visible(record):
            continue
        tc = record.tc_kelvin
        if tc is None:
            try:
                tc = parse_temperature(record.tc_raw).magnitude
            except QuantityParseError:
                continue
        key = (record.document_id, normalize_formula(record.formula))
        groups.setdefault(key, []).append(tc)
    findings = []
    for (document_id, material), values in sorted(groups.items()):
        distinct: list[float] = []
        for value in sorted(values):
            if not distinct or value - distinct[-1] > VALUE_TOLERANCE:
                distinct.append(value)
        if len(distinct) >= 2:
            findings.append(MultiTcGroup(document_id, material, tuple(distinct)))
    return findings


@dataclass
class ScanReport:
    checked: int = 0
    counts: dict = field(default_factory=lambda: {rule.value: 0 for rule in AnomalyRule})
    flagged: dict = field(default_factory=lambda: {rule.value: [] for rule in AnomalyRule})
    transitioned: list = field(default_factory=list)
    multi_tc_groups: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "counts": self.counts,
            "flagged": self.flagged,
            "transitioned": self.transitioned,
            "multi_tc_groups": [g.to_json() for g in self.multi_tc_groups],
            "errors": self.errors,
        }


class AnomalyScanner:
    """Runs the rules over stored records and applies invalidations."""

    def __init__(self, engine: CurationEngine):
        self.engine = engine
        self.store = engine.store

    def scan_ids(self, record_ids: Sequence[str]) -> ScanReport:
        report = ScanReport()
        records = []
        for record_id in record_ids:
            record = self.store.get_record(record_id)
            if record is None:
                report.errors.append({"record_id": record_id, "error": "not_found"})
                continue
            if not is_visible(record):
                report.errors.append({"record_id": record_id, "error": "not_visible"})
                continue
            records.append(record)
        report.checked = len(records)
        for record in records:
            flags = check_record(record)
            for flag in flags:
                report.counts[flag.rule.value] += 1
                report.flagged[flag.rule.value].append(record.record_id)
            if any(f.rule in MARKING_RULES for f in flags):
                if record.state.status != Status.INVALID:
                    try:
                        self.engine.invalidate_automatically(record.record_id)
                        report.transitioned.append(record.record_id)
                    except StagingError as exc:
                        report.errors.append(
                            {"record_id": record.record_id, "error": exc.code}
                        )
        report.multi_tc_groups = detect_multi_tc(records)
        report.counts[AnomalyRule.MULTI_TC.value] = len(report.multi_tc_groups)
        for group in report.multi_tc_groups:
            report.flagged[AnomalyRule.MULTI_TC.value].append(
                f"{group.document_id}:{group.material}"
            )
        return report

    def scan_all(self) -> ScanReport:
        return self.scan_ids([r.record_id for r in self.store.all_visible_records()])

    def scan_document(self, document_id: str) -> ScanReport:
        records = self.store.records_for_document(document_id)
        return self.scan_ids([r.record_id for r in records])

    def scan_status(self, status: str) -> ScanReport:
        from .store import Query

        page = self.store.query_records(Query(status=status, size=500))
        ids = [r.record_id for r in page.rows]
        seen = page.total
        current_page = 1
        while len(ids) < seen:
            current_page += 1
            more = self.store.query_records(Query(status=status, size=500, page=current_page))
            ids.extend(r.record_id for r in more.rows)
        return self.scan_ids(ids)
