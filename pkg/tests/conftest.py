"""Shared fixtures: synthetic study collections shaped like a real review update.

The generators build two-topic corpora (software-testing vs. data-management
vocabulary) so that included and excluded studies form distinct content
clusters, which gives the KNN neighborhoods and decision rules real signal.
All generation is seeded and deterministic.
"""

from __future__ import annotations

import random

import pytest

from evimap.corpus import Corpus, Status, Study, merge, parse_bibtex, serialize_bibtex


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion when the suite ran."""
    lines = []
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid:
                name = nodeid.split("test_criterion_", 1)[1].replace("_", "-")
                lines.append((name, label))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, label in sorted(lines):
            terminalreporter.write_line(f"{label}  {name}")

# Measured subject rows from the two-group selection experiment:
# (subject id, minutes, correctly included, correctly excluded,
#  incorrectly included, incorrectly excluded); 13 studies evaluated each.
SELECTION_EXPERIMENT_ROWS = {
    "group1": [
        ("1", 53, 5, 4, 3, 1),
        ("2", 55, 5, 7, 0, 1),
        ("3", 20, 4, 6, 1, 2),
        ("4", 22, 3, 7, 0, 3),
        ("5", 14, 2, 7, 0, 4),
        ("6", 26, 1, 6, 1, 5),
    ],
    "group2": [
        ("1", 23, 5, 7, 0, 1),
        ("2", 13, 6, 7, 0, 0),
        ("3", 19, 5, 7, 0, 1),
        ("4", 25, 5, 5, 2, 1),
        ("5", 13, 6, 7, 0, 0),
        ("6", 14, 5, 7, 0, 1),
    ],
}

TOPIC_A = [
    "aspect", "oriented", "testing", "fault", "coverage", "mutation", "unit",
    "integration", "regression", "pointcut", "advice", "weaving", "junit",
    "defect", "verification", "validation", "oracle", "suite", "assertion",
    "instrumentation", "refactoring", "inspection", "debugging", "criteria",
]

TOPIC_B = [
    "database", "query", "index", "transaction", "storage", "relational",
    "schema", "warehouse", "mining", "cluster", "partition", "replication",
    "concurrency", "locking", "recovery", "optimizer", "join", "cache",
    "stream", "columnar", "benchmark", "throughput", "latency", "scan",
]

FILLER = [
    "software", "engineering", "empirical", "study", "approach", "method",
    "analysis", "evaluation", "framework", "tool", "model", "process",
]

STOPWORD_NOISE = ["the", "of", "and", "for", "with", "a", "an", "to", "in", "on"]


def _sentence(rng: random.Random, topic: list[str], n_words: int) -> str:
    words = []
    for _ in range(n_words):
        bucket = rng.random()
        if bucket < 0.55:
            words.append(rng.choice(topic))
        elif bucket < 0.8:
            words.append(rng.choice(FILLER))
        else:
            words.append(rng.choice(STOPWORD_NOISE))
    return " ".join(words)


def _make_study(rng: random.Random, key: str, topic: list[str], status: Status) -> Study:
    return Study(
        key=key,
        title=_sentence(rng, topic, 8).title(),
        status=status,
        abstract=_sentence(rng, topic, 40),
        keywords=[rng.choice(topic) for _ in range(3)],
        references=[],
        doi=f"10.1000/{key}",
        entry_type="article",
        extra_fields={"year": str(rng.randint(1998, 2008))},
    )


def make_review_corpora(
    n_included: int = 63,
    n_excluded: int = 34,
    n_new: int = 13,
    seed: int = 7,
) -> tuple[Corpus, Corpus]:
    """Return (previous, new_search) corpora with clustered content.

    Included studies draw from topic A, excluded from topic B.  New studies
    alternate topics so the decision rules see both inclusion-like and
    exclusion-like neighborhoods; each cites a few same-topic studies.
    """
    rng = random.Random(seed)
    previous_studies = []
    for i in range(n_included):
        previous_studies.append(_make_study(rng, f"inc{i:03d}", TOPIC_A, Status.INCLUDED))
    for i in range(n_excluded):
        previous_studies.append(_make_study(rng, f"exc{i:03d}", TOPIC_B, Status.EXCLUDED))

    new_studies = []
    for i in range(n_new):
        topic = TOPIC_A if i % 2 == 0 else TOPIC_B
        study = _make_study(rng, f"new{i:03d}", topic, Status.TO_EVALUATE)
        pool = (
            [s.key for s in previous_studies if s.status is Status.INCLUDED]
            if topic is TOPIC_A
            else [s.key for s in previous_studies if s.status is Status.EXCLUDED]
        )
        study.references = rng.sample(pool, k=min(3, len(pool)))
        new_studies.append(study)

    return Corpus(studies=previous_studies), Corpus(studies=new_studies)


def make_merged_corpus(**kwargs) -> Corpus:
    previous, new = make_review_corpora(**kwargs)
    return merge(previous, new)


@pytest.fixture
def dataset2_files(tmp_path):
    """Write a 63/34 previous file and a 13-study new-search file to disk."""
    previous, new = make_review_corpora()
    prev_path = tmp_path / "previous.bib"
    new_path = tmp_path / "new.bib"
    prev_path.write_text(serialize_bibtex(previous), encoding="utf-8")
    new_path.write_text(serialize_bibtex(new), encoding="utf-8")
    return prev_path, new_path


@pytest.fixture
def dataset2_corpus() -> Corpus:
    return make_merged_corpus()


@pytest.fixture
def small_corpus() -> Corpus:
    text = """
@article{alpha,
  title = {Aspect Oriented Testing of Software},
  abstract = {testing aspects with mutation coverage},
  keywords = {testing, aspects},
  references = {beta},
  status = {included},
}

@article{beta,
  title = {Database Query Optimization},
  abstract = {relational query optimizer and indexes},
  keywords = {database, query},
  references = {},
  status = {excluded},
}

@article{gamma,
  title = {Mutation Testing Coverage Criteria},
  abstract = {unit testing with fault coverage},
  keywords = {testing},
  references = {alpha; beta},
  status = {toevaluate},
}
"""
    return parse_bibtex(text)
