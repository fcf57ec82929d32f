"""Score verdict sets against ground truth and summarize subject results.

Scoring compares a reviewer's (or the engine's) include/exclude verdicts
with the oracle labels, producing the four confusion counts.  Group
summaries use the arithmetic mean, the midpoint median, and the sample
(n-1) standard deviation.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from evimap.decision import Verdict


@dataclass(frozen=True)
class ScoreCounts:
    correctly_included: int
    correctly_excluded: int
    incorrectly_included: int
    incorrectly_excluded: int

    @property
    def total_evaluated(self) -> int:
        return (
            self.correctly_included
            + self.correctly_excluded
            + self.incorrectly_included
            + self.incorrectly_excluded
        )

    @property
    def total_correct(self) -> int:
        return self.correctly_included + self.correctly_excluded

    @property
    def total_incorrect(self) -> int:
        return self.incorrectly_included + self.incorrectly_excluded

    @property
    def percent_correct(self) -> float:
        if self.total_evaluated == 0:
            return 0.0
        return self.total_correct / self.total_evaluated

    def to_json_dict(self) -> dict:
        return {
            "correctly_included": self.correctly_included,
            "correctly_excluded": self.correctly_excluded,
            "incorrectly_included": self.incorrectly_included,
            "incorrectly_excluded": self.incorrectly_excluded,
            "total_correct": self.total_correct,
            "total_incorrect": self.total_incorrect,
            "total_evaluated": self.total_evaluated,
            "percent_correct": self.percent_correct,
        }


_BINARY = {Verdict.INCLUDE, Verdict.EXCLUDE}


def _coerce_verdict(value, side: str, key: str) -> Verdict:
    if isinstance(value, str):
        try:
            value = Verdict(value.strip().lower())
        except ValueError:
            raise ValueError(f"{side} verdict for '{key}' is not include/exclude: {value!r}")
    if value not in _BINARY:
        raise ValueError(
            f"{side} verdict for '{key}' must be include or exclude (undefined verdicts "
            "must be resolved before scoring)"
        )
    return value


def score_against_oracle(verdicts: dict, oracle: dict) -> ScoreCounts:
    """Confusion counts of verdicts vs. oracle labels over the same key set."""
    missing = sorted(set(oracle) - set(verdicts))
    extra = sorted(set(verdicts) - set(oracle))
    if missing or extra:
        raise ValueError(
            f"verdict/oracle key sets differ: missing from verdicts {missing}, "
            f"not in oracle {extra}"
        )

    ci = ce = ii = ie = 0
    for key in sorted(oracle):
        verdict = _coerce_verdict(verdicts[key], "subject", key)
        truth = _coerce_verdict(oracle[key], "oracle", key)
        if verdict is Verdict.INCLUDE and truth is Verdict.INCLUDE:
            ci += 1
        elif verdict is Verdict.EXCLUDE and truth is Verdict.EXCLUDE:
            ce += 1
        elif verdict is Verdict.INCLUDE and truth is Verdict.EXCLUDE:
            ii += 1
        else:
            ie += 1
    return ScoreCounts(ci, ce, ii, ie)


@dataclass(frozen=True)
class SubjectResult:
    """One subject's timing and scoring for the selection task."""

    subject_id: str
    time_minutes: float
    counts: ScoreCounts

    @property
    def total_correct(self) -> int:
        return self.counts.total_correct

    @property
    def total_incorrect(self) -> int:
        return self.counts.total_incorrect

    @property
    def percent_correct(self) -> float:
        return self.counts.percent_correct


@dataclass(frozen=True)
class Stats:
    mean: float
    median: float
    stddev: float
    min: float
    max: float

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "median": self.median,
            "stddev": self.stddev,
            "min": self.min,
            "max": self.max,
        }


def summary_stats(values: list[float]) -> Stats:
    """Mean, midpoint median, sample standard deviation, min, max.

    A single observation has no sample spread; its stddev is reported as 0.
    """
    if not values:
        raise ValueError("cannot summarize an empty list")
    return Stats(
        mean=statistics.mean(values),
        median=statistics.median(values),
        stddev=statistics.stdev(values) if len(values) > 1 else 0.0,
        min=min(values),
        max=max(values),
    )


@dataclass(frozen=True)
class GroupSummary:
    time_minutes: Stats
    correct: Stats
    incorrect: Stats
    percent_correct: Stats

    def to_json_dict(self) -> dict:
        return {
            "time_minutes": self.time_minutes.to_json_dict(),
            "correct": self.correct.to_json_dict(),
            "incorrect": self.incorrect.to_json_dict(),
            "percent_correct": self.percent_correct.to_json_dict(),
        }


def summarize_group(results: list[SubjectResult]) -> GroupSummary:
    """Per-metric summary statistics over a non-empty list of subjects."""
    if not results:
        raise ValueError("cannot summarize an empty group")
    return GroupSummary(
        time_minutes=summary_stats([r.time_minutes for r in results]),
        correct=summary_stats([float(r.total_correct) for r in results]),
        incorrect=summary_stats([float(r.total_incorrect) for r in results]),
        percent_correct=summary_stats([r.percent_correct for r in results]),
    )


def format_results_table(groups: dict[str, list[SubjectResult]]) -> str:
    """Render subject rows plus per-group summary lines as a fixed-width table."""
    header = (
        f"{'Group':<10} {'Subject':<8} {'Time':>6} {'CorrInc':>8} {'CorrExc':>8} "
        f"{'Correct':>8} {'Pct':>7} {'WrongInc':>9} {'WrongExc':>9} {'Wrong':>6}"
    )
    lines = [header, "-" * len(header)]
    for group_name, results in groups.items():
        for r in results:
            c = r.counts
            lines.append(
                f"{group_name:<10} {r.subject_id:<8} {r.time_minutes:>6.0f} "
                f"{c.correctly_included:>8} {c.correctly_excluded:>8} "
                f"{c.total_correct:>8} {c.percent_correct * 100:>6.1f}% "
                f"{c.incorrectly_included:>9} {c.incorrectly_excluded:>9} "
                f"{c.total_incorrect:>6}"
            )
        summary = summarize_group(results)
        lines.append(
            f"{group_name:<10} {'mean':<8} {summary.time_minutes.mean:>6.1f} "
            f"{'':>8} {'':>8} {summary.correct.mean:>8.1f} "
            f"{summary.percent_correct.mean * 100:>6.1f}% {'':>9} {'':>9} "
            f"{summary.incorrect.mean:>6.1f}"
        )
        lines.append(
            f"{group_name:<10} {'median':<8} {summary.time_minutes.median:>6.1f} "
            f"{'':>8} {'':>8} {summary.correct.median:>8.1f} "
            f"{summary.percent_correct.median * 100:>6.1f}% {'':>9} {'':>9} "
            f"{summary.incorrect.median:>6.1f}"
        )
        lines.append(
            f"{group_name:<10} {'stddev':<8} {summary.time_minutes.stddev:>6.1f} "
            f"{'':>8} {'':>8} {summary.correct.stddev:>8.2f} "
            f"{summary.percent_correct.stddev * 100:>6.1f}% {'':>9} {'':>9} "
            f"{summary.incorrect.stddev:>6.2f}"
        )
    return "\n".join(lines)
