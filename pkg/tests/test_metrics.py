from __future__ import annotations

import textwrap

import pytest
from hypothesis import given
from hypothesis import strategies as st

from matstage.errors import ValidationError
from matstage.metrics import (
    EvalRow,
    EvalScores,
    audit_rows,
    consistent_row_count,
    group_scores,
    load_bundled_eval_table,
    load_eval_table,
    macro_average,
    overall,
    round_half_up,
    score_counts,
)

counts = st.integers(min_value=0, max_value=10_000)


class TestScoreCounts:
    @pytest.mark.parametrize(
        "tp,fp,fn,expected",
        [
            (13, 1, 0, (92.86, 100.00, 96.30)),
            (0, 0, 3, (100.00, 0.00, 0.00)),
            (0, 0, 0, (100.00, 100.00, 100.00)),
            (5, 1, 1, (83.33, 83.33, 83.33)),
            (4, 0, 8, (100.00, 33.33, 50.00)),
            (4, 4, 3, (50.00, 57.14, 53.33)),
        ],
    )
    def test_examples(self, tp, fp, fn, expected):
        assert score_counts(tp, fp, fn).rounded() == expected

    def test_negative_counts_rejected(self):
        with pytest.raises(ValidationError):
            score_counts(-1, 0, 0)

    @given(counts, counts, counts, st.integers(min_value=1, max_value=50))
    def test_scale_invariance(self, tp, fp, fn, k):
        base = score_counts(tp, fp, fn)
        scaled = score_counts(tp * k, fp * k, fn * k)
        assert base.precision == pytest.approx(scaled.precision)
        assert base.recall == pytest.approx(scaled.recall)
        assert base.f1 == pytest.approx(scaled.f1)

    @given(counts, counts, counts)
    def test_symmetry(self, tp, fp, fn):
        forward = score_counts(tp, fp, fn)
        swapped = score_counts(tp, fn, fp)
        assert forward.precision == pytest.approx(swapped.recall)
        assert forward.recall == pytest.approx(swapped.precision)
        assert forward.f1 == pytest.approx(swapped.f1)

    @given(counts, counts, counts)
    def test_f1_between_precision_and_recall(self, tp, fp, fn):
        scores = score_counts(tp, fp, fn)
        if scores.precision + scores.recall > 0:
            low = min(scores.precision, scores.recall)
            high = max(scores.precision, scores.recall)
            assert low - 1e-9 <= scores.f1 <= high + 1e-9


class TestMacroAverage:
    def test_single_row_is_identity(self):
        scores = EvalScores(80.0, 60.0, 68.57)
        assert macro_average([scores]) == scores

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            macro_average([])

    def test_plain_mean_per_metric(self):
        result = macro_average([EvalScores(100, 0, 0), EvalScores(0, 100, 100)])
        assert (result.precision, result.recall, result.f1) == (50.0, 50.0, 50.0)


class TestBundledTable:
    def test_thirty_rows(self):
        assert len(load_bundled_eval_table()) == 30

    def test_method_aggregates(self):
        rows = load_bundled_eval_table()
        groups = {g.key["method"]: g for g in group_scores(rows, ["method"])}
        pdf = groups["pdf"].scores
        assert (pdf.precision, pdf.recall, pdf.f1) == (
            pytest.approx(87.83, abs=0.01),
            pytest.approx(45.61, abs=0.01),
            pytest.approx(52.67, abs=0.01),
        )
        interface = groups["interface"].scores
        assert (interface.precision, interface.recall, interface.f1) == (
            pytest.approx(93.38, abs=0.01),
            pytest.approx(92.51, abs=0.01),
            pytest.approx(92.02, abs=0.01),
        )

    def test_curator_aggregates(self):
        rows = load_bundled_eval_table()
        groups = {g.key["curator"]: g for g in group_scores(rows, ["curator"])}
        expected = {
            "MS": (90.03, 60.26, 64.50, 10, 96),
            "PD": (83.33, 65.69, 69.45, 10, 100),
            "SR": (98.45, 81.22, 83.08, 10, 96),
        }
        for curator, (p, r, f1, docs, pages) in expected.items():
            group = groups[curator]
            assert group.scores.precision == pytest.approx(p, abs=0.01)
            assert group.scores.recall == pytest.approx(r, abs=0.01)
            assert group.scores.f1 == pytest.approx(f1, abs=0.01)
            assert (group.docs, group.pages) == (docs, pages)

    def test_curator_method_aggregates(self):
        rows = load_bundled_eval_table()
        groups = {
            (g.key["curator"], g.key["method"]): g
            for g in group_scores(rows, ["curator", "method"])
        }
        expected = {
            ("MS", "pdf"): (94.58, 36.55, 48.67, 6, 46),
            ("MS", "interface"): (83.19, 95.83, 88.25, 4, 50),
            ("PD", "pdf"): (70.00, 48.51, 50.78, 5, 49),
            ("PD", "interface"): (96.67, 82.86, 88.11, 5, 51),
            ("SR", "pdf"): (100.00, 55.56, 61.03, 4, 51),
            ("SR", "interface"): (97.42, 98.33, 97.78, 6, 45),
        }
        for key, (p, r, f1, docs, pages) in expected.items():
            group = groups[key]
            assert group.scores.precision == pytest.approx(p, abs=0.01)
            assert group.scores.recall == pytest.approx(r, abs=0.01)
            assert group.scores.f1 == pytest.approx(f1, abs=0.01)
            assert (group.docs, group.pages) == (docs, pages)

    def test_audit_finds_the_impossible_recall(self):
        rows = load_bundled_eval_table()
        impossible = [m for m in audit_rows(rows) if m.impossible]
        assert len(impossible) == 1
        mismatch = impossible[0]
        assert (mismatch.document_id, mismatch.curator, mismatch.method) == (
            "0454e07f64", "PD", "pdf")
        assert mismatch.metric == "recall"
        assert mismatch.reported == pytest.approx(16.67)
        assert mismatch.computed == 0.0

    def test_consistency_census(self):
        # Recomputation from counts reproduces the reported scores on 23 of
        # the 30 rows; the other 7 carry reported values that the counts
        # cannot yield. Pinned so any fixture edit or formula change shows up.
        rows = load_bundled_eval_table()
        assert consistent_row_count(rows) == 23
        bad_rows = {(m.document_id, m.curator, m.method) for m in audit_rows(rows)}
        assert bad_rows == {
            ("08e1cb8f4f", "PD", "interface"),
            ("0454e07f64", "PD", "pdf"),
            ("0012333581", "PD", "pdf"),
            ("0021fd339f", "MS", "interface"),
            ("039105663f", "MS", "pdf"),
            ("02c4f00127", "MS", "interface"),
            ("021c413172", "MS", "pdf"),
        }


class TestLoader:
    def test_counts_only_header(self, tmp_path):
        path = tmp_path / "eval.csv"
        path.write_text(textwrap.dedent("""\
            document_id,pages,method,curator,tp,fp,fn
            0123456789,4,I,SR,6,0,0
            """), encoding="utf-8")
        rows = load_eval_table(path)
        assert len(rows) == 1
        assert rows[0].reported is None
        assert rows[0].scores().rounded() == (100.0, 100.0, 100.0)

    def test_header_only(self, tmp_path):
        path = tmp_path / "eval.csv"
        path.write_text("document_id,pages,method,curator,tp,fp,fn\n", encoding="utf-8")
        assert load_eval_table(path) == []

    def test_negative_count_reports_line(self, tmp_path):
        path = tmp_path / "eval.csv"
        path.write_text(textwrap.dedent("""\
            document_id,pages,method,curator,tp,fp,fn
            0123456789,4,I,SR,6,0,0
            0123456789,4,P,SR,-1,0,0
            """), encoding="utf-8")
        with pytest.raises(ValidationError) as excinfo:
            load_eval_table(path)
        assert "line 3" in str(excinfo.value)

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "eval.csv"
        path.write_text("document_id,tp\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_eval_table(path)

    def test_curator_and_method_aliases(self, tmp_path):
        path = tmp_path / "eval.csv"
        path.write_text(textwrap.dedent("""\
            document_id,pages,method,curator,tp,fp,fn
            0123456789,4,Interface,PS,6,0,0
            0123456789,4,PDF document,MS,6,0,0
            """), encoding="utf-8")
        rows = load_eval_table(path)
        assert rows[0].method == "interface"
        assert rows[0].curator == "PD"
        assert rows[1].method == "pdf"


def test_round_half_up():
    assert round_half_up(48.515) == 48.52
    assert round_half_up(48.5149) == 48.51
    assert round_half_up(92.857142) == 92.86


def test_overall_aggregate():
    rows = load_bundled_eval_table()
    scores = overall(rows)
    assert 0 < scores.f1 < 100
