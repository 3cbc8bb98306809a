"""HTTP scoring API.

POST /api/analyze runs the full pipeline once and caches the sentence
list plus the complete (sources x sentences) score matrix in a session;
GET /api/analyze/{id} re-sorts or switches the mimicked source from the
cache without any re-featurization. Sessions expire after a TTL; expired
ids answer 410, unknown ids 404.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import ranking
from .errors import CheckworthyError, EmptyInput, UnknownSource
from .pipeline import ScoredDocument, Scorer

DEFAULT_TTL_SECONDS = 3600.0
DEFAULT_MAX_BODY_BYTES = 100_000

COLOR_BINS = 5


def color_bin(score: float) -> int:
    """Equal-width bins over [0, 1]; the top bin absorbs score == 1."""
    return min(COLOR_BINS - 1, int(score * COLOR_BINS))


@dataclass
class SessionRecord:
    id: str
    created_at: float
    language: str
    sentences: list  # list[Sentence]
    matrix: np.ndarray  # (n_sources, n_sentences)


class SessionStore:
    """TTL-bounded in-memory session map. Expired entries keep a tombstone
    (id + creation time, payload freed) so they answer 410, not 404."""

    def __init__(self, ttl: float = DEFAULT_TTL_SECONDS, clock: Callable[[], float] = time.monotonic):
        self.ttl = ttl
        self.clock = clock
        self._lock = threading.Lock()
        self._records: dict[str, SessionRecord | float] = {}

    def put(self, record: SessionRecord) -> None:
        with self._lock:
            self._records[record.id] = record

    def get(self, session_id: str) -> SessionRecord | None:
        """The live record, None when unknown; raises ExpiredSession via a
        sentinel float tombstone."""
        now = self.clock()
        with self._lock:
            entry = self._records.get(session_id)
            if entry is None:
                return None
            created = entry if isinstance(entry, float) else entry.created_at
            if now - created > self.ttl:
                self._records[session_id] = created  # drop payload, keep tombstone
                raise ExpiredSession(session_id)
            if isinstance(entry, float):
                raise ExpiredSession(session_id)
            return entry

    def new_id(self) -> str:
        return secrets.token_hex(16)  # 128-bit


class ExpiredSession(CheckworthyError):
    pass


def _error(status: int, code: str, detail: str = "") -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "detail": detail})


def _sentence_payload(doc_sentences, scores) -> list[dict]:
    return [
        {
            "index": sentence.index,
            "text": sentence.text,
            "score": float(score),
            "color_bin": color_bin(float(score)),
        }
        for sentence, score in zip(doc_sentences, scores)
    ]


def create_app(
    scorer: Scorer | None,
    ttl: float = DEFAULT_TTL_SECONDS,
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES,
    static_dir: str | None = None,
    clock: Callable[[], float] = time.monotonic,
) -> FastAPI:
    app = FastAPI(title="checkworthy", docs_url=None, redoc_url=None)
    store = SessionStore(ttl=ttl, clock=clock)
    app.state.store = store
    app.state.scorer = scorer

    sources = list(scorer.sources) if scorer is not None else []

    @app.get("/api/sources")
    def get_sources():
        return sources

    @app.post("/api/analyze")
    async def analyze(request: Request):
        if app.state.scorer is None:
            return _error(503, "ModelNotLoaded", "no model bundle is loaded")
        try:
            body = await request.json()
        except Exception:
            return _error(400, "EmptyInput", "request body must be JSON with a 'text' field")
        text = body.get("text") if isinstance(body, dict) else None
        source = body.get("source", "Any") if isinstance(body, dict) else "Any"
        if not isinstance(text, str) or len(text.encode("utf-8")) < 1:
            return _error(400, "EmptyInput", "text must be a non-empty string")
        if len(text.encode("utf-8")) > max_body_bytes:
            return _error(400, "TooLarge", f"text exceeds {max_body_bytes} bytes")
        if source not in sources:
            return _error(400, "UnknownSource", f"unknown source {source!r}")
        try:
            doc: ScoredDocument = app.state.scorer.score_text(text)
        except EmptyInput as exc:
            return _error(400, "EmptyInput", str(exc))
        session_id = store.new_id()
        store.put(
            SessionRecord(
                id=session_id,
                created_at=clock(),
                language=doc.language.value,
                sentences=doc.sentences,
                matrix=doc.matrix,
            )
        )
        return {
            "session_id": session_id,
            "language": doc.language.value,
            "sentences": _sentence_payload(doc.sentences, doc.matrix[sources.index(source)]),
        }

    @app.get("/api/analyze/{session_id}")
    def reread(session_id: str, source: str = "Any", sort: str = "position"):
        if source not in sources:
            return _error(400, "UnknownSource", f"unknown source {source!r}")
        if sort not in ("score", "position"):
            return _error(400, "UnknownSort", f"sort must be 'score' or 'position', got {sort!r}")
        try:
            record = store.get(session_id)
        except ExpiredSession:
            return _error(410, "ExpiredSession", "session has expired; resubmit the text")
        if record is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        row = record.matrix[sources.index(source)]
        if sort == "score":
            order = ranking.rank([float(v) for v in row]).order
        else:
            order = list(range(len(record.sentences)))
        sentences = [record.sentences[i] for i in order]
        scores = [float(row[i]) for i in order]
        return {
            "session_id": session_id,
            "language": record.language,
            "sentences": _sentence_payload(sentences, scores),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
