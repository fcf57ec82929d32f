"""Classify each to-evaluate study from its neighborhood and citations.

Two rules, applied to every study awaiting evaluation:

* Include: it neighbors at least one previously included study AND it does
  not cite any previously excluded study.
* Exclude: it has no previously included neighbor, at least one previously
  excluded neighbor, AND it does not cite any previously included study.

Anything matching neither rule is Undefined and goes to the human reviewer.
"Neighbor" means adjacency in the symmetrized KNN graph; citation checks
look one hop along the study's outgoing edges.  The rules are mutually
exclusive by construction: Include demands an included neighbor, Exclude
forbids one.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from evimap.corpus import Corpus, Status, Study
from evimap.graphs import CitationGraph, KnnGraph


class Verdict(Enum):
    INCLUDE = "include"
    EXCLUDE = "exclude"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class Evidence:
    """Status breakdown of a study's neighbors and outgoing citations."""

    included_neighbors: tuple[str, ...]
    excluded_neighbors: tuple[str, ...]
    cited_included: tuple[str, ...]
    cited_excluded: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "included_neighbors": list(self.included_neighbors),
            "excluded_neighbors": list(self.excluded_neighbors),
            "cited_included": list(self.cited_included),
            "cited_excluded": list(self.cited_excluded),
        }


@dataclass(frozen=True)
class Decision:
    key: str
    verdict: Verdict
    evidence: Evidence

    def to_json_dict(self) -> dict:
        return {
            "key": self.key,
            "verdict": self.verdict.value,
            "evidence": self.evidence.to_json_dict(),
        }


@dataclass
class DecisionSet:
    decisions: list[Decision]

    def __len__(self) -> int:
        return len(self.decisions)

    def __iter__(self):
        return iter(self.decisions)

    def get(self, key: str) -> Decision | None:
        for decision in self.decisions:
            if decision.key == key:
                return decision
        return None

    def counts(self) -> dict[str, int]:
        out = {v.value: 0 for v in Verdict}
        for decision in self.decisions:
            out[decision.verdict.value] += 1
        return out

    def to_json_dict(self) -> dict:
        return {
            "schema": "evimap/decisions@1",
            "counts": self.counts(),
            "decisions": [d.to_json_dict() for d in self.decisions],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "DecisionSet":
        decisions = [
            Decision(
                key=entry["key"],
                verdict=Verdict(entry["verdict"]),
                evidence=Evidence(
                    included_neighbors=tuple(entry["evidence"]["included_neighbors"]),
                    excluded_neighbors=tuple(entry["evidence"]["excluded_neighbors"]),
                    cited_included=tuple(entry["evidence"]["cited_included"]),
                    cited_excluded=tuple(entry["evidence"]["cited_excluded"]),
                ),
            )
            for entry in payload["decisions"]
        ]
        return cls(decisions=decisions)


def verdict_from_evidence(evidence: Evidence) -> Verdict:
    """Pure rule evaluation over an evidence record."""
    if evidence.included_neighbors and not evidence.cited_excluded:
        return Verdict.INCLUDE
    if (
        not evidence.included_neighbors
        and evidence.excluded_neighbors
        and not evidence.cited_included
    ):
        return Verdict.EXCLUDE
    return Verdict.UNDEFINED


def gather_evidence(
    key: str, knn: KnnGraph, cites: CitationGraph, statuses: dict[str, Status]
) -> Evidence:
    neighbors = knn.neighbors_of(key)
    cited = cites.cited_by(key)
    return Evidence(
        included_neighbors=tuple(
            sorted(n for n in neighbors if statuses.get(n) is Status.INCLUDED)
        ),
        excluded_neighbors=tuple(
            sorted(n for n in neighbors if statuses.get(n) is Status.EXCLUDED)
        ),
        cited_included=tuple(sorted(c for c in cited if statuses.get(c) is Status.INCLUDED)),
        cited_excluded=tuple(sorted(c for c in cited if statuses.get(c) is Status.EXCLUDED)),
    )


def classify_study(
    study: Study, knn: KnnGraph, cites: CitationGraph, statuses: dict[str, Status]
) -> Decision:
    """Classify one to-evaluate study; anything else is a caller error."""
    if study.status is not Status.TO_EVALUATE:
        raise ValueError(f"study '{study.key}' is not awaiting evaluation")
    evidence = gather_evidence(study.key, knn, cites, statuses)
    return Decision(key=study.key, verdict=verdict_from_evidence(evidence), evidence=evidence)


def classify_all(corpus: Corpus, knn: KnnGraph, cites: CitationGraph) -> DecisionSet:
    """Classify every to-evaluate study, in corpus order."""
    statuses = corpus.statuses()
    decisions = [
        classify_study(study, knn, cites, statuses)
        for study in corpus
        if study.status is Status.TO_EVALUATE
    ]
    return DecisionSet(decisions=decisions)
