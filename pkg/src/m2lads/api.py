"""REST service over the session store.

Read endpoints mirror the store one-to-one and never mutate it; the only
write is POST /api/sessions, which runs the ingest pipeline on a manifest
and persists the result.  Domain errors map to status codes: missing
things 404, bad input 400, duplicate ids 409, anything unexpected 500
with an incident id in the server log.
"""

from __future__ import annotations

import logging
import mimetypes
import os
import re
import uuid
from dataclasses import dataclass

import uvicorn
from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import pipeline
from .ingest import IngestError
from .serialization import record_to_payload
from .store import (
    ENV_STORE_ROOT,
    DuplicateSession,
    InvalidRange,
    NameCollision,
    NotFound,
    PathViolation,
    SessionStore,
    StoreError,
    ValidationFailed,
)
from .types import SessionRecord, SignalKind

log = logging.getLogger("m2lads.api")

_RANGE_RE = re.compile(r"bytes=(\d*)-(\d*)$")


class ApiError(Exception):
    pass


class BindFailure(ApiError):
    def __init__(self, address: str, reason: str):
        super().__init__(f"cannot bind {address}: {reason}")


class StoreUnavailable(ApiError):
    def __init__(self, root: str):
        super().__init__(f"store root not readable: {root}")


@dataclass
class ApiConfig:
    bind_address: str = "127.0.0.1:8000"
    store_root: str | None = None
    cors_allowed_origin: str = "*"
    max_points_cap: int = 5000


def _summary_payload(record: SessionRecord, store: SessionStore) -> dict:
    """Catalog-plus view of one session without the bulky matrices."""
    return {
        "session_id": record.session_id,
        "learner": {
            "learner_id": record.learner.learner_id,
            "attributes": dict(record.learner.attributes),
        },
        "window": {"start": record.window.start, "end": record.window.end},
        "created_at": record.created_at,
        "signals": [
            {
                "kind": kind.value,
                "unit": kind.unit,
                "row_count": len(record.learner_matrices[kind].rows),
            }
            for kind in SignalKind
            if kind in record.learner_matrices
        ],
        "activity_count": len(record.merged_matrix.intervals),
        "blink_count": len(record.blinks.times),
        "pretest_items": len(record.pretest.rows),
        "posttest_items": len(record.posttest.rows),
        "frame_videos": [fi.video_id for fi in record.frame_indexes],
        "media": [
            {"name": ref.name, "byte_size": ref.byte_size}
            for ref in store.list_media(record.session_id)
        ],
    }


def create_app(config: ApiConfig | None = None) -> FastAPI:
    config = config or ApiConfig()
    app = FastAPI(title="session analytics api", openapi_url=None)
    if config.cors_allowed_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.cors_allowed_origin],
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    def store() -> SessionStore:
        return SessionStore(config.store_root)

    @app.exception_handler(StoreError)
    async def on_store_error(request: Request, exc: StoreError) -> JSONResponse:
        if isinstance(exc, NotFound):
            return JSONResponse({"error": "not_found"}, status_code=404)
        if isinstance(exc, (DuplicateSession, NameCollision)):
            return JSONResponse({"error": "conflict", "detail": str(exc)}, status_code=409)
        if isinstance(exc, (ValidationFailed, InvalidRange, PathViolation)):
            return JSONResponse({"error": "validation", "detail": str(exc)}, status_code=400)
        incident = uuid.uuid4().hex
        log.error("incident %s: %s", incident, exc, exc_info=exc)
        return JSONResponse({"error": "internal", "incident_id": incident}, status_code=500)

    @app.exception_handler(pipeline.InvalidManifest)
    async def on_bad_manifest(request: Request, exc: pipeline.InvalidManifest) -> JSONResponse:
        return JSONResponse({"error": "validation", "detail": str(exc)}, status_code=400)

    @app.exception_handler(RequestValidationError)
    async def on_bad_params(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse({"error": "validation", "detail": str(exc)}, status_code=400)

    @app.exception_handler(IngestError)
    async def on_ingest_error(request: Request, exc: IngestError) -> JSONResponse:
        return JSONResponse({"error": "validation", "detail": str(exc)}, status_code=400)

    @app.exception_handler(Exception)
    async def on_unexpected(request: Request, exc: Exception) -> JSONResponse:
        incident = uuid.uuid4().hex
        log.error("incident %s: %s", incident, exc, exc_info=exc)
        return JSONResponse({"error": "internal", "incident_id": incident}, status_code=500)

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/api/sessions")
    async def list_sessions(
        learner_id: str | None = None,
        t_from: int | None = Query(default=None, alias="from"),
        t_to: int | None = Query(default=None, alias="to"),
    ) -> list:
        time_range = None
        if t_from is not None or t_to is not None:
            lo = t_from if t_from is not None else 0
            hi = t_to if t_to is not None else (1 << 62)
            time_range = (lo, hi)
        return [
            {
                "session_id": entry.session_id,
                "learner_id": entry.learner_id,
                "window": {"start": entry.window.start, "end": entry.window.end},
                "created_at": entry.created_at,
            }
            for entry in store().list_sessions(learner_id, time_range)
        ]

    @app.post("/api/sessions", status_code=201)
    async def ingest_session(request: Request) -> dict:
        try:
            payload = await request.json()
        except ValueError:
            return JSONResponse(
                {"error": "validation", "detail": "body is not JSON"}, status_code=400
            )
        manifest = pipeline.IngestManifest.from_payload(payload)
        try:
            record = pipeline.build_record(manifest)
        except FileNotFoundError as exc:
            return JSONResponse(
                {"error": "validation", "detail": f"missing input file: {exc.filename}"},
                status_code=400,
            )
        backend = store()
        backend.put_session(record)
        for name in sorted(manifest.media_paths):
            backend.attach_media(record.session_id, name, manifest.media_paths[name])
        return {"session_id": record.session_id}

    @app.get("/api/sessions/{session_id}")
    async def get_session(session_id: str) -> dict:
        backend = store()
        return _summary_payload(backend.get_session(session_id), backend)

    @app.get("/api/sessions/{session_id}/signals/{kind_token}")
    async def get_signal(
        session_id: str,
        kind_token: str,
        t_from: int | None = Query(default=None, alias="from"),
        t_to: int | None = Query(default=None, alias="to"),
        max_points: int = 1000,
    ) -> dict:
        try:
            kind = SignalKind.from_token(kind_token)
        except KeyError:
            raise NotFound(f"signal kind {kind_token!r}") from None
        backend = store()
        if t_from is None or t_to is None:
            record = backend.get_session(session_id)
            t_from = record.window.start if t_from is None else t_from
            t_to = record.window.end if t_to is None else t_to
        points = backend.query_signal(
            session_id, kind, t_from, t_to, min(max_points, config.max_points_cap)
        )
        return {
            "kind": kind.value,
            "from": t_from,
            "to": t_to,
            "points": [
                {"t": t, "mean": mean, "min": lo, "max": hi, "activity_id": activity_id}
                for t, mean, lo, hi, activity_id in points
            ],
        }

    @app.get("/api/sessions/{session_id}/activities")
    async def get_activities(session_id: str) -> dict:
        record = store().get_session(session_id)
        return {
            "source": record.merged_matrix.source.value,
            "intervals": [
                {"activity_id": iv.activity_id, "t_start": iv.t_start, "t_end": iv.t_end}
                for iv in record.merged_matrix.intervals
            ],
        }

    @app.get("/api/sessions/{session_id}/analytics/correlations")
    async def get_correlations(session_id: str) -> dict:
        record = store().get_session(session_id)
        return record_to_payload(record)["correlations"]

    @app.get("/api/sessions/{session_id}/performance")
    async def get_performance(session_id: str) -> dict:
        record = store().get_session(session_id)
        return record_to_payload(record)["performance"]

    @app.get("/api/sessions/{session_id}/summaries")
    async def get_summaries(session_id: str) -> dict:
        record = store().get_session(session_id)
        return record_to_payload(record)["summaries"]

    @app.get("/api/sessions/{session_id}/frames/{video_id}")
    async def get_frames(session_id: str, video_id: str) -> dict:
        record = store().get_session(session_id)
        for fi in record.frame_indexes:
            if fi.video_id == video_id:
                return {"video_id": fi.video_id, "rows": [list(row) for row in fi.rows]}
        raise NotFound(f"frame index {video_id!r}")

    @app.get("/api/sessions/{session_id}/media/{name}")
    async def get_media(session_id: str, name: str, request: Request) -> Response:
        path = store().media_path(session_id, name)
        size = os.path.getsize(path)
        content_type = mimetypes.guess_type(name)[0] or "application/octet-stream"
        range_header = request.headers.get("range")
        start, end = 0, size - 1
        status = 200
        if range_header is not None:
            match = _RANGE_RE.match(range_header.strip())
            if match and (match.group(1) or match.group(2)):
                first, last = match.group(1), match.group(2)
                if first:
                    start = int(first)
                    end = min(int(last), size - 1) if last else size - 1
                else:
                    # suffix form: last N bytes
                    start = max(size - int(last), 0)
                    end = size - 1
                if start >= size or start > end:
                    return Response(
                        status_code=416,
                        headers={"Content-Range": f"bytes */{size}"},
                    )
                status = 206
        with open(path, "rb") as handle:
            handle.seek(start)
            body = handle.read(end - start + 1)
        headers = {"Accept-Ranges": "bytes", "Content-Length": str(len(body))}
        if status == 206:
            headers["Content-Range"] = f"bytes {start}-{end}/{size}"
        return Response(content=body, status_code=status, media_type=content_type, headers=headers)

    return app


def serve(config: ApiConfig) -> None:
    """Run the service until interrupted."""
    root = config.store_root or os.environ.get(ENV_STORE_ROOT)
    if root is not None and not os.path.isdir(root):
        raise StoreUnavailable(root)
    host, _, port_text = config.bind_address.rpartition(":")
    host = host or "127.0.0.1"
    try:
        port = int(port_text)
    except ValueError:
        raise BindFailure(config.bind_address, "port is not a number") from None
    app = create_app(config)
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    except OSError as exc:
        raise BindFailure(config.bind_address, str(exc)) from None
