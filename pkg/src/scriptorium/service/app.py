"""HTTP service: sessions, direct tool invocation, KB browsing.

Endpoints (bodies documented in docs/wire-protocol.md):
    GET  /health
    POST /sessions
    POST /sessions/{id}/turns        {"query": str, "images": [{name?, png_base64}]}
    GET  /sessions/{id}/trace
    GET  /kb/fragments/{id}
    GET  /kb/search?q=&k=
    POST /tools/{name}               tool-call wire format

Every response carries a request id. Turns within one session serialize
on a per-session lock; distinct sessions run concurrently against the
shared read-only snapshot.
"""

from __future__ import annotations

import secrets
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..agent.catalog import ToolContext, build_catalog, dispatch_tool
from ..agent.llm import LlmConfig, make_client
from ..agent.loop import run_turn
from ..agent.state import SessionState
from ..errors import ArgumentError, NotFoundError, ScriptoriumError
from ..images import RasterImage
from ..text.index import retrieve_texts

SESSION_TTL_SECONDS = 24 * 3600
TRACE_CAP = 200  # retained trace entries per session


class ImagePayload(BaseModel):
    png_base64: str
    name: str = "upload"


class TurnBody(BaseModel):
    query: str = ""
    images: list[ImagePayload] = Field(default_factory=list)
    artifact_handles: list[str] = Field(default_factory=list)


class ToolBody(BaseModel):
    tool: str | None = None
    args: dict = Field(default_factory=dict)
    call_id: str = ""


@dataclass
class ApiSession:
    session_id: str
    created_at: float
    state: SessionState
    lock: threading.Lock = field(default_factory=threading.Lock)
    trace_log: list[dict] = field(default_factory=list)


def _error(request_id: str, status: int, code: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"request_id": request_id, "error": {"code": code,
                                                     "message": message, **extra}},
    )


def create_app(snapshot, llm_config: LlmConfig | None = None,
               session_ttl: float = SESSION_TTL_SECONDS) -> FastAPI:
    """Build the service over an index-built snapshot."""
    app = FastAPI(title="scriptorium", docs_url=None, redoc_url=None)
    catalog = build_catalog(snapshot)
    llm_client = make_client(llm_config or LlmConfig())
    sessions: dict[str, ApiSession] = {}
    sessions_lock = threading.Lock()

    def new_request_id() -> str:
        return uuid.uuid4().hex[:12]

    def get_session(session_id: str) -> ApiSession | None:
        with sessions_lock:
            session = sessions.get(session_id)
            if session is None:
                return None
            if time.monotonic() - session.created_at > session_ttl:
                del sessions[session_id]
                return None
            return session

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        path = ".".join(str(p) for p in first.get("loc", ()))
        return _error(new_request_id(), 422, "validation_error",
                      first.get("msg", "invalid body"), field=path)

    @app.get("/health")
    def health():
        return {"status": "ok", "request_id": new_request_id(),
                "fragments": len(snapshot.indexes.fragment_ids)}

    @app.post("/sessions")
    def create_session():
        request_id = new_request_id()
        session_id = secrets.token_hex(16)
        with sessions_lock:
            sessions[session_id] = ApiSession(
                session_id=session_id, created_at=time.monotonic(),
                state=SessionState(session_id))
        return {"request_id": request_id, "session_id": session_id}

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: TurnBody):
        request_id = new_request_id()
        session = get_session(session_id)
        if session is None:
            return _error(request_id, 404, "session_not_found",
                          f"unknown or expired session {session_id!r}")
        with session.lock:  # strict per-session turn serialization
            try:
                images = [(img.name, RasterImage.from_base64_png(img.png_base64))
                          for img in body.images]
            except ArgumentError as exc:
                return _error(request_id, 422, "validation_error", str(exc),
                              field="images")
            try:
                outcome = run_turn(session.state, snapshot, catalog,
                                   body.query, images, llm_client,
                                   artifact_handles=body.artifact_handles)
            except ArgumentError as exc:
                return _error(request_id, 422, "invalid_argument", str(exc))
            except ScriptoriumError as exc:
                return _error(request_id, 500, type(exc).__name__, str(exc))
            session.trace_log.extend(outcome.trace)
            del session.trace_log[:-TRACE_CAP]
            artifacts = {}
            for handle, artifact in session.state.artifacts.items():
                if artifact.kind == "image" and artifact.meta.get("source_call", "").startswith(f"t{outcome.turn}."):
                    artifacts[handle] = {
                        "kind": "image",
                        "png_base64": artifact.payload.to_base64_png(),
                        "meta": {k: v for k, v in artifact.meta.items() if k != "order"},
                    }
            return {
                "request_id": request_id,
                "session_id": session_id,
                "turn": outcome.turn,
                "response": outcome.response_text,
                "result": outcome.result,
                "trace": outcome.trace,
                "artifacts": artifacts,
            }

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str):
        request_id = new_request_id()
        session = get_session(session_id)
        if session is None:
            return _error(request_id, 404, "session_not_found",
                          f"unknown or expired session {session_id!r}")
        return {"request_id": request_id, "session_id": session_id,
                "turns": session.state.t, "trace": session.trace_log}

    @app.get("/kb/fragments/{fragment_id}")
    def get_fragment(fragment_id: str):
        request_id = new_request_id()
        try:
            bundle = snapshot.lookup_fragment(fragment_id)
        except NotFoundError as exc:
            return _error(request_id, 404, "fragment_not_found", str(exc))
        images = {}
        for record in (bundle.rubbing, bundle.facsimile):
            if record is not None and record.image_ref in snapshot.images:
                images[record.image_ref] = snapshot.images[record.image_ref].to_base64_png()
        return {
            "request_id": request_id,
            "fragment_id": bundle.fragment_id,
            "rubbing": bundle.rubbing.to_dict() if bundle.rubbing else None,
            "facsimile": bundle.facsimile.to_dict() if bundle.facsimile else None,
            "characters": [c.to_dict() for c in bundle.characters],
            "interpretations": [r.to_dict() for r in bundle.interpretations],
            "document_chunks": [c.to_dict() for c in bundle.document_chunks],
            "images": images,
        }

    @app.get("/kb/search")
    def kb_search(q: str = "", k: int = 5):
        request_id = new_request_id()
        if not q:
            return _error(request_id, 422, "validation_error",
                          "query parameter q must be non-empty", field="q")
        try:
            hits = retrieve_texts(snapshot.indexes.text_index, q, k)
        except ArgumentError as exc:
            return _error(request_id, 422, "invalid_argument", str(exc), field="k")
        return {
            "request_id": request_id,
            "query": q,
            "hits": [
                {"chunk_id": h.chunk_id, "score": h.score, "rank": h.rank,
                 "snippet": h.snippet, "kind": h.kind, "source_ref": h.source_ref}
                for h in hits
            ],
        }

    @app.post("/tools/{name}")
    def post_tool(name: str, body: ToolBody):
        request_id = new_request_id()
        if body.tool is not None and body.tool != name:
            return _error(request_id, 422, "validation_error",
                          f"body tool {body.tool!r} does not match path {name!r}",
                          field="tool")
        if name not in catalog:
            return _error(request_id, 404, "tool_not_found", f"unknown tool {name!r}")
        ctx = ToolContext(snapshot, state=None, turn=0)
        response = dispatch_tool(
            {"tool": name, "args": body.args, "call_id": body.call_id or request_id},
            catalog, ctx)
        return {"request_id": request_id, **response}

    app.state.snapshot = snapshot
    app.state.catalog = catalog
    app.state.sessions = sessions
    return app
