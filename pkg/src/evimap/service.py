"""HTTP/JSON API backing the interactive review workbench.

Endpoints:

* ``POST /sessions``             upload previous + new BibTeX files, run the pipeline
* ``GET  /sessions/{sid}/map``     content-map payload (positions, statuses, KNN edges)
* ``GET  /sessions/{sid}/bundles`` hierarchy, leaf order, citation edges
* ``GET  /sessions/{sid}/studies/{key}``        study detail with rule evidence
* ``POST /sessions/{sid}/studies/{key}/mark``   reviewer include/exclude override
* ``GET  /sessions/{sid}/export``  updated review as BibTeX

Pipeline computation runs to completion before a session becomes visible.
Reads are lock-free; marks on one session are serialized and persisted
before the response returns.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Form, HTTPException, UploadFile
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from evimap.corpus import BibtexParseError, corpus_stats
from evimap.decision import Verdict
from evimap.session import (
    PipelineConfig,
    ReviewSession,
    StatusConflictError,
    UnknownStudyError,
    build_session,
    bundles_payload,
    map_payload,
    study_payload,
)


class MarkRequest(BaseModel):
    verdict: str


class SessionStore:
    """In-memory session registry backed by one JSON file per session."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, ReviewSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        for path in sorted(self.directory.glob("*.json")):
            session = ReviewSession.load(path)
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.json"

    def add(self, session: ReviewSession) -> None:
        session.save(self._path(session.session_id))
        with self._registry_lock:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()

    def get(self, session_id: str) -> ReviewSession:
        session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session '{session_id}'")
        return session

    def lock(self, session_id: str) -> threading.Lock:
        return self._locks[session_id]

    def persist(self, session: ReviewSession) -> None:
        session.save(self._path(session.session_id))


def create_app(sessions_dir: str | Path = "sessions") -> FastAPI:
    app = FastAPI(title="evimap review service")
    store = SessionStore(sessions_dir)
    app.state.store = store

    @app.post("/sessions", status_code=201)
    async def create_session(
        previous: UploadFile,
        new: UploadFile,
        k: int = Form(5),
        seed: int = Form(0),
        iterations: int = Form(300),
        tolerance: float = Form(1e-6),
    ):
        try:
            previous_text = (await previous.read()).decode("utf-8")
            new_text = (await new.read()).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise HTTPException(status_code=400, detail=f"files must be UTF-8: {exc}")
        config = PipelineConfig(k=k, seed=seed, max_iterations=iterations, tolerance=tolerance)
        try:
            session = build_session(previous_text, new_text, config)
        except BibtexParseError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        store.add(session)
        counts = corpus_stats(session.corpus)
        return {
            "session_id": session.session_id,
            "studies": counts.total,
            "status_counts": {
                "included": counts.included,
                "excluded": counts.excluded,
                "toevaluate": counts.to_evaluate,
            },
            "decision_counts": session.decisions.counts(),
            "warnings": list(session.corpus.warnings),
        }

    @app.get("/sessions/{session_id}/map")
    def get_map(session_id: str):
        return map_payload(store.get(session_id))

    @app.get("/sessions/{session_id}/bundles")
    def get_bundles(session_id: str):
        return bundles_payload(store.get(session_id))

    @app.get("/sessions/{session_id}/studies/{key}")
    def get_study(session_id: str, key: str):
        session = store.get(session_id)
        try:
            return study_payload(session, key)
        except UnknownStudyError:
            raise HTTPException(status_code=404, detail=f"unknown study '{key}'")

    @app.post("/sessions/{session_id}/studies/{key}/mark")
    def mark_study(session_id: str, key: str, request: MarkRequest):
        session = store.get(session_id)
        try:
            verdict = Verdict(request.verdict.strip().lower())
        except ValueError:
            raise HTTPException(status_code=422, detail=f"invalid verdict {request.verdict!r}")
        if verdict is Verdict.UNDEFINED:
            raise HTTPException(status_code=422, detail="mark requires include or exclude")
        with store.lock(session_id):
            try:
                session.mark(key, verdict)
            except UnknownStudyError:
                raise HTTPException(status_code=404, detail=f"unknown study '{key}'")
            except StatusConflictError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            store.persist(session)
        return study_payload(session, key)

    @app.get("/sessions/{session_id}/export", response_class=PlainTextResponse)
    def export_session(session_id: str):
        return store.get(session_id).export_bibtex()

    return app
