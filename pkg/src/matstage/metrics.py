"""Curation-quality evaluation: per-document precision/recall/F1 and
macro-aggregation by curation method and curator experience.

Scores are percentages. Zero-denominator conventions: with no predictions
(tp+fp=0) precision is 100, with nothing expected (tp+fn=0) recall is 100,
and F1 is 0 when P+R is 0. Aggregation is a macro average, the arithmetic
mean of per-document percentages, never pooled counts.

A bundled fixture (``data/curation_quality_eval.csv``) transcribes a
30-row evaluation of 15 documents, each curated once per method. The
fixture carries both the raw counts and the originally reported scores;
``audit_rows`` cross-checks one against the other, because the reported
scores of several rows cannot be derived from their counts (one row is
arithmetically impossible: zero true positives with a nonzero recall).
Aggregations prefer reported row scores so published aggregate numbers
are reproduced exactly.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .errors import ValidationError

METHODS = ("interface", "pdf")
_METHOD_ALIASES = {
    "i": "interface",
    "interface": "interface",
    "p": "pdf",
    "pdf": "pdf",
    "pdf document": "pdf",
}
CURATORS = ("MS", "PD", "SR")
_CURATOR_ALIASES = {"MS": "MS", "PD": "PD", "PS": "PD", "SR": "SR"}

GROUP_KEYS = ("curator", "method")


@dataclass(frozen=True)
class EvalScores:
    precision: float
    recall: float
    f1: float

    def __post_init__(self):
        for name, value in (
            ("precision", self.precision),
            ("recall", self.recall),
            ("f1", self.f1),
        ):
            if not 0.0 <= value <= 100.0:
                raise ValidationError(f"{name} must be within [0, 100], got {value}")

    def rounded(self) -> tuple[float, float, float]:
        return tuple(round_half_up(v) for v in (self.precision, self.recall, self.f1))

    def to_json(self) -> dict:
        p, r, f1 = self.rounded()
        return {"precision": p, "recall": r, "f1": f1}


@dataclass(frozen=True)
class EvalRow:
    document_id: str
    pages: int
    method: str
    curator: str
    tp: int
    fp: int
    fn: int
    reported: Optional[EvalScores] = None

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValidationError("counts must be non-negative")
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")
        if self.curator not in CURATORS:
            raise ValidationError(f"unknown curator {self.curator!r}")

    def scores(self) -> EvalScores:
        """Reported scores when present, otherwise recomputed from counts."""
        return self.reported or score_counts(self.tp, self.fp, self.fn)


def round_half_up(value: float, places: int = 2) -> float:
    exponent = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(exponent, rounding=ROUND_HALF_UP))


def score_counts(tp: int, fp: int, fn: int) -> EvalScores:
    """Precision, recall and F1 (as percentages) from raw counts."""
    if min(tp, fp, fn) < 0:
        raise ValidationError("counts must be non-negative")
    precision = 100.0 if tp + fp == 0 else 100.0 * tp / (tp + fp)
    recall = 100.0 if tp + fn == 0 else 100.0 * tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return EvalScores(precision, recall, f1)


def macro_average(scores: Sequence[EvalScores]) -> EvalScores:
    """Arithmetic mean of each metric independently."""
    if not scores:
        raise ValidationError("cannot average an empty score list")
    n = len(scores)
    return EvalScores(
        sum(s.precision for s in scores) / n,
        sum(s.recall for s in scores) / n,
        sum(s.f1 for s in scores) / n,
    )


@dataclass(frozen=True)
class GroupScores:
    key: dict
    scores: EvalScores
    docs: int
    pages: int

    def to_json(self) -> dict:
        return {**self.key, **self.scores.to_json(), "docs": self.docs, "pages": self.pages}


def group_scores(rows: Sequence[EvalRow], keys: Sequence[str]) -> list[GroupScores]:
    """Macro-average per-document scores for each (curator and/or method) group."""
    if not rows:
        raise ValidationError("no rows to group")
    bad = [k for k in keys if k not in GROUP_KEYS]
    if bad:
        raise ValidationError(f"unknown grouping keys: {bad}")
    buckets: dict[tuple, list[EvalRow]] = {}
    for row in rows:
        key = tuple(getattr(row, k) for k in keys)
        buckets.setdefault(key, []).append(row)
    result = []
    for key in sorted(buckets):
        members = buckets[key]
        result.append(
            GroupScores(
                key=dict(zip(keys, key)),
                scores=macro_average([r.scores() for r in members]),
                docs=len(members),
                pages=sum(r.pages for r in members),
            )
        )
    return result


def overall(rows: Sequence[EvalRow]) -> EvalScores:
    return macro_average([r.scores() for r in rows])


@dataclass(frozen=True)
class ScoreMismatch:
    """One reported metric that recomputation from counts cannot reproduce."""

    document_id: str
    method: str
    curator: str
    metric: str
    computed: float
    reported: float
    impossible: bool

    def describe(self) -> str:
        note = " (impossible for any counts)" if self.impossible else ""
        return (
            f"{self.document_id} {self.curator}/{self.method}: {self.metric} "
            f"reported {self.reported:.2f} but counts give {self.computed:.2f}{note}"
        )


def audit_rows(rows: Sequence[EvalRow], tolerance: float = 0.01) -> list[ScoreMismatch]:
    """Cross-check reported scores against recomputation from counts.

    A mismatch is flagged ``impossible`` when no counts whatsoever could
    produce the reported value, e.g. a positive recall with zero true
    positives.
    """
    mismatches = []
    for row in rows:
        if row.reported is None:
            continue
        computed = score_counts(row.tp, row.fp, row.fn)
        checks = (
            ("precision", computed.precision, row.reported.precision,
             row.tp == 0 and row.fp > 0 and row.reported.precision > 0),
            ("recall", computed.recall, row.reported.recall,
             row.tp == 0 and row.fn > 0 and row.reported.recall > 0),
            ("f1", computed.f1, row.reported.f1, False),
        )
        for metric, got, want, impossible in checks:
            if abs(got - want) > tolerance:
                mismatches.append(
                    ScoreMismatch(
                        row.document_id, row.method, row.curator,
                        metric, got, want, impossible,
                    )
                )
    return mismatches


def consistent_row_count(rows: Sequence[EvalRow], tolerance: float = 0.01) -> int:
    """Rows whose reported scores all match recomputation from counts."""
    bad = {(m.document_id, m.method, m.curator) for m in audit_rows(rows, tolerance)}
    return sum(1 for r in rows if (r.document_id, r.method, r.curator) not in bad)


_REQUIRED_COLUMNS = ("document_id", "pages", "method", "curator", "tp", "fp", "fn")
_SCORE_COLUMNS = ("precision", "recall", "f1")


def load_eval_table(path: Union[str, Path]) -> list[EvalRow]:
    """Read an evaluation CSV.

    Required header: document_id,pages,method,curator,tp,fp,fn. Optional
    trailing columns precision,recall,f1 carry reported scores. Method and
    curator accept the usual shorthands (I/P, PS for PD).
    """
    with open(path, newline="", encoding="utf-8") as fp:
        reader = csv.DictReader(fp)
        header = reader.fieldnames or []
        missing = [c for c in _REQUIRED_COLUMNS if c not in header]
        if missing:
            raise ValidationError(f"missing columns: {missing}")
        has_scores = all(c in header for c in _SCORE_COLUMNS)
        rows = []
        for line_no, raw in enumerate(reader, start=2):
            try:
                method = _METHOD_ALIASES[raw["method"].strip().lower()]
                curator = _CURATOR_ALIASES[raw["curator"].strip().upper()]
                reported = None
                if has_scores and raw["precision"].strip():
                    reported = EvalScores(
                        float(raw["precision"]), float(raw["recall"]), float(raw["f1"])
                    )
                rows.append(
                    EvalRow(
                        document_id=raw["document_id"].strip(),
                        pages=int(raw["pages"]),
                        method=method,
                        curator=curator,
                        tp=int(raw["tp"]),
                        fp=int(raw["fp"]),
                        fn=int(raw["fn"]),
                        reported=reported,
                    )
                )
            except (KeyError, ValueError, ValidationError) as exc:
                message = getattr(exc, "message", None) or str(exc)
                raise ValidationError(f"{path}, line {line_no}: {message}")
    return rows


def bundled_eval_table_path() -> Path:
    """Location of the packaged evaluation fixture."""
    return Path(str(resources.files("matstage").joinpath("data/curation_quality_eval.csv")))


def load_bundled_eval_table() -> list[EvalRow]:
    return load_eval_table(bundled_eval_table_path())


def score_report(
    rows: Sequence[EvalRow], keys: Sequence[str] = ()
) -> dict:
    """Aggregate rows, timing the computation; shaped for CLI/JSON output."""
    started = time.perf_counter()
    if keys:
        groups = [g.to_json() for g in group_scores(rows, keys)]
    else:
        groups = [
            {
                **overall(rows).to_json(),
                "docs": len(rows),
                "pages": sum(r.pages for r in rows),
            }
        ]
    mismatches = audit_rows(rows)
    return {
        "groups": groups,
        "rows": len(rows),
        "consistent_rows": consistent_row_count(rows),
        "mismatches": [m.describe() for m in mismatches],
        "elapsed_seconds": time.perf_counter() - started,
    }
