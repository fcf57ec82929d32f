"""Tests for oracle scoring and group summary statistics."""

import pytest

from evimap.decision import Verdict
from evimap.evaluation import (
    ScoreCounts,
    SubjectResult,
    format_results_table,
    score_against_oracle,
    summarize_group,
    summary_stats,
)

from conftest import SELECTION_EXPERIMENT_ROWS


def subject_results(group: str) -> list[SubjectResult]:
    return [
        SubjectResult(
            subject_id=sid,
            time_minutes=float(minutes),
            counts=ScoreCounts(ci, ce, ii, ie),
        )
        for sid, minutes, ci, ce, ii, ie in SELECTION_EXPERIMENT_ROWS[group]
    ]


class TestScoring:
    def test_perfect_match_13_studies(self):
        oracle = {f"inc{i}": "include" for i in range(6)}
        oracle.update({f"exc{i}": "exclude" for i in range(7)})
        counts = score_against_oracle(dict(oracle), oracle)
        assert counts == ScoreCounts(6, 7, 0, 0)
        assert counts.percent_correct == 1.0

    def test_group1_subject1_pattern(self):
        # 5 correct includes, 4 correct excludes, 3 wrong includes, 1 wrong exclude.
        oracle = {}
        verdicts = {}
        for i in range(5):
            oracle[f"a{i}"] = "include"
            verdicts[f"a{i}"] = "include"
        for i in range(4):
            oracle[f"b{i}"] = "exclude"
            verdicts[f"b{i}"] = "exclude"
        for i in range(3):
            oracle[f"c{i}"] = "exclude"
            verdicts[f"c{i}"] = "include"
        oracle["d0"] = "include"
        verdicts["d0"] = "exclude"
        counts = score_against_oracle(verdicts, oracle)
        assert counts == ScoreCounts(5, 4, 3, 1)
        assert counts.total_correct == 9
        assert counts.percent_correct == pytest.approx(9 / 13, abs=1e-12)
        assert counts.percent_correct * 100 == pytest.approx(69.2, abs=0.05)

    def test_all_wrong(self):
        oracle = {"x": "include", "y": "exclude"}
        verdicts = {"x": "exclude", "y": "include"}
        counts = score_against_oracle(verdicts, oracle)
        assert counts == ScoreCounts(0, 0, 1, 1)
        assert counts.percent_correct == 0.0

    def test_key_mismatch_error(self):
        with pytest.raises(ValueError, match="key sets differ"):
            score_against_oracle({"a": "include"}, {"a": "include", "b": "exclude"})

    def test_undefined_verdict_rejected(self):
        with pytest.raises(ValueError, match="resolved before scoring"):
            score_against_oracle({"a": "undefined"}, {"a": "include"})

    def test_enum_verdicts_accepted(self):
        counts = score_against_oracle({"a": Verdict.INCLUDE}, {"a": Verdict.INCLUDE})
        assert counts.correctly_included == 1

    def test_counts_sum_invariant(self):
        counts = ScoreCounts(5, 4, 3, 1)
        assert counts.total_correct + counts.total_incorrect == counts.total_evaluated


class TestExperimentRows:
    def test_row_totals_and_percentages(self):
        expected = {
            "group1": [(9, 69.2), (12, 92.3), (10, 76.9), (10, 76.9), (9, 69.2), (7, 53.8)],
            "group2": [(12, 92.3), (13, 100.0), (12, 92.3), (10, 76.9), (13, 100.0), (12, 92.3)],
        }
        for group, rows in expected.items():
            for result, (correct, pct) in zip(subject_results(group), rows):
                assert result.total_correct == correct
                assert result.counts.total_evaluated == 13
                assert result.percent_correct * 100 == pytest.approx(pct, abs=0.05)

    def test_group1_times(self):
        summary = summarize_group(subject_results("group1"))
        assert summary.time_minutes.mean == pytest.approx(31.67, abs=0.01)
        assert summary.time_minutes.median == pytest.approx(24.0, abs=1e-9)
        assert summary.time_minutes.stddev == pytest.approx(17.74, abs=0.01)

    def test_group2_times(self):
        summary = summarize_group(subject_results("group2"))
        assert summary.time_minutes.mean == pytest.approx(17.83, abs=0.01)
        assert summary.time_minutes.median == pytest.approx(16.5, abs=1e-9)
        assert summary.time_minutes.stddev == pytest.approx(5.31, abs=0.01)

    def test_group2_correct_counts(self):
        summary = summarize_group(subject_results("group2"))
        assert summary.correct.mean == pytest.approx(12.0, abs=1e-9)
        assert summary.correct.median == pytest.approx(12.0, abs=1e-9)
        assert summary.correct.stddev == pytest.approx(1.10, abs=0.01)

    def test_group1_accuracy(self):
        summary = summarize_group(subject_results("group1"))
        assert summary.correct.mean == pytest.approx(9.5, abs=1e-9)
        assert summary.correct.median == pytest.approx(9.5, abs=1e-9)
        assert summary.correct.stddev == pytest.approx(1.64, abs=0.01)

    def test_incorrect_mirrors_correct_spread(self):
        g1 = summarize_group(subject_results("group1"))
        g2 = summarize_group(subject_results("group2"))
        assert g1.incorrect.mean == pytest.approx(3.5, abs=1e-9)
        assert g2.incorrect.mean == pytest.approx(1.0, abs=1e-9)
        assert g1.incorrect.stddev == pytest.approx(1.64, abs=0.01)
        assert g2.incorrect.stddev == pytest.approx(1.09, abs=0.01)


class TestSummaryStats:
    def test_midpoint_median_even_count(self):
        stats = summary_stats([14, 20, 22, 26, 53, 55])
        assert stats.median == 24.0
        assert stats.min == 14 and stats.max == 55

    def test_sample_stddev(self):
        # Sample (n-1) formula, not population.
        stats = summary_stats([2.0, 4.0])
        assert stats.stddev == pytest.approx(2.0 ** 0.5, abs=1e-12)

    def test_single_value(self):
        stats = summary_stats([5.0])
        assert stats.mean == 5.0
        assert stats.stddev == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summary_stats([])
        with pytest.raises(ValueError):
            summarize_group([])

    def test_permutation_invariance(self):
        results = subject_results("group1")
        shuffled = list(reversed(results))
        assert summarize_group(results) == summarize_group(shuffled)


def test_results_table_renders_all_rows():
    groups = {name: subject_results(name) for name in SELECTION_EXPERIMENT_ROWS}
    table = format_results_table(groups)
    assert table.count("group1") == 9  # 6 subjects + 3 summary lines
    assert "69.2%" in table
    assert "100.0%" in table
