"""End-to-end review session: pipeline state, reviewer overrides, persistence.

A session is built once from the previous review's studies plus the new
search results, runs the full pipeline (merge, vectorize, project, graphs,
classify), and then accepts reviewer overrides on to-evaluate studies.
Export applies engine verdicts first and reviewer overrides on top
(overrides win); an undefined verdict without an override leaves the study
as still to evaluate.

Sessions persist as one JSON document each and round-trip losslessly.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from evimap.corpus import Corpus, Status, Study, corpus_stats, merge, parse_bibtex, serialize_bibtex
from evimap.decision import DecisionSet, Verdict, classify_all
from evimap.graphs import CitationGraph, KnnGraph, citation_graph, knn_edges
from evimap.projection import (
    BundleTree,
    DistanceMatrix,
    ProjectedMap,
    ProjectionConfig,
    build_bundle_tree,
    distance_matrix,
    project,
)
from evimap.textprep import build_matrix, load_stopwords

SCHEMA = "evimap/session@1"

STATUS_COLORS = {
    Status.INCLUDED.value: "green",
    Status.EXCLUDED.value: "red",
    Status.TO_EVALUATE.value: "grey",
}


class UnknownStudyError(KeyError):
    pass


class StatusConflictError(ValueError):
    """Raised when marking a study that is not awaiting evaluation."""


@dataclass
class PipelineConfig:
    k: int = 5
    seed: int = 0
    max_iterations: int = 300
    tolerance: float = 1e-6
    stoplist_path: str | None = None

    def to_json_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_dict(cls, payload: dict) -> "PipelineConfig":
        return cls(**payload)


@dataclass
class Override:
    verdict: Verdict
    timestamp: str

    def to_json_dict(self) -> dict:
        return {"verdict": self.verdict.value, "timestamp": self.timestamp}


@dataclass
class ReviewSession:
    session_id: str
    config: PipelineConfig
    corpus: Corpus
    projected: ProjectedMap
    knn: KnnGraph
    citations: CitationGraph
    tree: BundleTree
    decisions: DecisionSet
    overrides: dict[str, Override] = field(default_factory=dict)

    # -- state queries ----------------------------------------------------

    def effective_status(self, key: str) -> Status:
        """Study status with any reviewer override applied."""
        study = self.corpus.get(key)
        if study is None:
            raise UnknownStudyError(key)
        override = self.overrides.get(key)
        if override is not None:
            return (
                Status.INCLUDED if override.verdict is Verdict.INCLUDE else Status.EXCLUDED
            )
        return study.status

    def mark(self, key: str, verdict: Verdict, timestamp: str | None = None) -> Override:
        """Record a reviewer verdict on a to-evaluate study (last write wins)."""
        study = self.corpus.get(key)
        if study is None:
            raise UnknownStudyError(key)
        if study.status is not Status.TO_EVALUATE:
            raise StatusConflictError(
                f"study '{key}' was already classified as {study.status.value}"
            )
        if verdict not in (Verdict.INCLUDE, Verdict.EXCLUDE):
            raise ValueError("a reviewer verdict must be include or exclude")
        if timestamp is None:
            timestamp = datetime.now(timezone.utc).isoformat()
        override = Override(verdict=verdict, timestamp=timestamp)
        self.overrides[key] = override
        return override

    def export_status(self, key: str) -> Status:
        """Status a study carries in the exported review.

        Reviewer override first, then the engine verdict; an undefined
        verdict without an override stays to-evaluate.
        """
        study = self.corpus.get(key)
        if study is None:
            raise UnknownStudyError(key)
        if study.status is not Status.TO_EVALUATE:
            return study.status
        override = self.overrides.get(key)
        if override is not None:
            return Status.INCLUDED if override.verdict is Verdict.INCLUDE else Status.EXCLUDED
        decision = self.decisions.get(key)
        if decision is not None and decision.verdict is Verdict.INCLUDE:
            return Status.INCLUDED
        if decision is not None and decision.verdict is Verdict.EXCLUDE:
            return Status.EXCLUDED
        return Status.TO_EVALUATE

    def export_corpus(self) -> Corpus:
        studies = []
        for study in self.corpus:
            status = self.export_status(study.key)
            if status is study.status:
                studies.append(study)
            else:
                studies.append(
                    Study(
                        key=study.key,
                        title=study.title,
                        status=status,
                        abstract=study.abstract,
                        keywords=list(study.keywords),
                        references=list(study.references),
                        doi=study.doi,
                        entry_type=study.entry_type,
                        extra_fields=dict(study.extra_fields),
                    )
                )
        return Corpus(studies=studies)

    def export_bibtex(self) -> str:
        return serialize_bibtex(self.export_corpus())

    # -- persistence -------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "session_id": self.session_id,
            "config": self.config.to_json_dict(),
            "corpus": _corpus_to_json(self.corpus),
            "map": self.projected.to_json_dict(),
            "knn": self.knn.to_json_dict(),
            "citations": self.citations.to_json_dict(),
            "tree": self.tree.to_json_dict(),
            "decisions": self.decisions.to_json_dict(),
            "overrides": {k: o.to_json_dict() for k, o in self.overrides.items()},
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "ReviewSession":
        if payload.get("schema") != SCHEMA:
            raise ValueError(f"unsupported session schema: {payload.get('schema')!r}")
        return cls(
            session_id=payload["session_id"],
            config=PipelineConfig.from_json_dict(payload["config"]),
            corpus=_corpus_from_json(payload["corpus"]),
            projected=ProjectedMap.from_json_dict(payload["map"]),
            knn=KnnGraph.from_json_dict(payload["knn"]),
            citations=CitationGraph.from_json_dict(payload["citations"]),
            tree=BundleTree.from_json_dict(payload["tree"]),
            decisions=DecisionSet.from_json_dict(payload["decisions"]),
            overrides={
                k: Override(verdict=Verdict(o["verdict"]), timestamp=o["timestamp"])
                for k, o in payload["overrides"].items()
            },
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), indent=2, sort_keys=True), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "ReviewSession":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _corpus_to_json(corpus: Corpus) -> dict:
    return {
        "studies": [
            {
                "key": s.key,
                "title": s.title,
                "status": s.status.value,
                "abstract": s.abstract,
                "keywords": list(s.keywords),
                "references": list(s.references),
                "doi": s.doi,
                "entry_type": s.entry_type,
                "extra_fields": dict(s.extra_fields),
            }
            for s in corpus
        ],
        "warnings": list(corpus.warnings),
    }


def _corpus_from_json(payload: dict) -> Corpus:
    studies = [
        Study(
            key=entry["key"],
            title=entry["title"],
            status=Status(entry["status"]),
            abstract=entry["abstract"],
            keywords=list(entry["keywords"]),
            references=list(entry["references"]),
            doi=entry["doi"],
            entry_type=entry["entry_type"],
            extra_fields=dict(entry["extra_fields"]),
        )
        for entry in payload["studies"]
    ]
    return Corpus(studies=studies, warnings=list(payload["warnings"]))


def build_session(
    previous_text: str,
    new_text: str,
    config: PipelineConfig | None = None,
    session_id: str | None = None,
) -> ReviewSession:
    """Run the full pipeline on two BibTeX payloads and assemble a session."""
    if config is None:
        config = PipelineConfig()
    if session_id is None:
        session_id = uuid.uuid4().hex

    previous = parse_bibtex(previous_text)
    new_search = parse_bibtex(new_text)
    merged = merge(previous, new_search)

    stoplist = load_stopwords(config.stoplist_path)
    matrix = build_matrix(merged, stoplist)
    distances = distance_matrix(matrix)
    projected = project(
        distances,
        ProjectionConfig(
            seed=config.seed,
            max_iterations=config.max_iterations,
            tolerance=config.tolerance,
        ),
    )
    knn = knn_edges(projected, config.k)
    citations = citation_graph(merged)
    tree = build_bundle_tree(distances)
    decisions = classify_all(merged, knn, citations)

    return ReviewSession(
        session_id=session_id,
        config=config,
        corpus=merged,
        projected=projected,
        knn=knn,
        citations=citations,
        tree=tree,
        decisions=decisions,
    )


def map_payload(session: ReviewSession) -> dict:
    """Positions, effective statuses, and KNN edges for the content map view."""
    points = []
    for i, key in enumerate(session.projected.doc_keys):
        status = session.effective_status(key)
        decision = session.decisions.get(key)
        points.append(
            {
                "key": key,
                "x": float(session.projected.positions[i, 0]),
                "y": float(session.projected.positions[i, 1]),
                "status": status.value,
                "color": STATUS_COLORS[status.value],
                "verdict": decision.verdict.value if decision else None,
            }
        )
    counts = corpus_stats(session.corpus)
    return {
        "schema": "evimap/map-view@1",
        "session_id": session.session_id,
        "colors": dict(STATUS_COLORS),
        "stress": session.projected.final_stress,
        "k": session.knn.k,
        "status_counts": {
            "included": counts.included,
            "excluded": counts.excluded,
            "toevaluate": counts.to_evaluate,
        },
        "points": points,
        "knn_edges": [list(edge) for edge in session.knn.edges],
    }


def bundles_payload(session: ReviewSession) -> dict:
    """Hierarchy, circular leaf order, and directed citation links."""
    statuses = {
        key: session.effective_status(key).value for key in session.projected.doc_keys
    }
    return {
        "schema": "evimap/bundles-view@1",
        "session_id": session.session_id,
        "colors": dict(STATUS_COLORS),
        "tree": session.tree.root.to_json_dict(),
        "leaf_order": list(session.tree.leaf_order),
        "statuses": statuses,
        "citation_edges": [
            {"citing": citing, "cited": cited} for citing, cited in session.citations.edges
        ],
    }


def study_payload(session: ReviewSession, key: str) -> dict:
    """Detail-on-demand record for one study."""
    study = session.corpus.get(key)
    if study is None:
        raise UnknownStudyError(key)
    decision = session.decisions.get(key)
    override = session.overrides.get(key)
    status = session.effective_status(key)
    return {
        "schema": "evimap/study-detail@1",
        "key": study.key,
        "title": study.title,
        "abstract": study.abstract,
        "keywords": list(study.keywords),
        "references": list(study.references),
        "doi": study.doi,
        "status": status.value,
        "color": STATUS_COLORS[status.value],
        "original_status": study.status.value,
        "verdict": decision.verdict.value if decision else None,
        "evidence": decision.evidence.to_json_dict() if decision else None,
        "override": override.to_json_dict() if override else None,
    }
