"""HTTP service: session management, document updates, and SSE view streams.

Each session owns a document, a prompt catalog, and a view engine. Cursor
placement opens a server-sent-event stream that announces the snapped scope
and then the lifecycle of every view in the cursor's neighborhood.
"""

from __future__ import annotations

import asyncio
import json
import os
import secrets
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import AsyncIterator, Mapping

from fastapi import FastAPI, HTTPException
from fastapi.responses import Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .document import (
    CursorScope,
    Document,
    diff_paragraphs,
    snap,
)
from .engine import (
    EVENT_DELTA,
    EVENT_DONE,
    EVENT_ERROR,
    EngineEvent,
    View,
    ViewEngine,
)
from .markdown import blocks_to_wire, parse_display
from .prompts import (
    DEFAULT_PROMPT_ID,
    PromptNotFoundError,
    PromptSet,
    PromptTemplate,
    PromptValidationError,
)
from .providers import (
    MockProvider,
    OpenAIChatProvider,
    Provider,
    ProviderConfig,
    load_fixtures,
)

MAX_DOCUMENT_BYTES = 1_048_576
DEFAULT_DEBOUNCE_S = 0.3


@dataclass
class ServiceConfig:
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    use_mock: bool = False
    fixtures_path: str | None = None
    debounce_s: float = DEFAULT_DEBOUNCE_S
    max_document_bytes: int = MAX_DOCUMENT_BYTES
    state_path: str | None = None
    static_dir: str | None = None

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> ServiceConfig:
        env = os.environ if env is None else env
        config = cls(provider=ProviderConfig.from_env(env))
        config.use_mock = env.get("PARAVIEWS_MOCK", "") in ("1", "true", "yes")
        config.fixtures_path = env.get("PARAVIEWS_FIXTURES") or None
        if "PARAVIEWS_DEBOUNCE_S" in env:
            config.debounce_s = float(env["PARAVIEWS_DEBOUNCE_S"])
        config.state_path = env.get("PARAVIEWS_STATE") or None
        config.static_dir = env.get("PARAVIEWS_STATIC_DIR") or None
        return config


class CreateSessionBody(BaseModel):
    text: str


class UpdateDocumentBody(BaseModel):
    text: str
    base_version: int


class CursorBody(BaseModel):
    offset: int
    prompt_id: str = DEFAULT_PROMPT_ID


class CreatePromptBody(BaseModel):
    label: str
    body: str
    category: str = "custom"


class EditPromptBody(BaseModel):
    body: str
    label: str | None = None


class Session:
    def __init__(self, session_id: str, document: Document, engine: ViewEngine):
        self.id = session_id
        self.document = document
        self.engine = engine
        self.scope: CursorScope | None = None
        self.tasks: list[asyncio.Task] = []

    @property
    def prompts(self) -> PromptSet:
        return self.engine.prompts

    def keep(self, task: asyncio.Task) -> None:
        self.tasks.append(task)
        task.add_done_callback(self.tasks.remove)


def wire_json(obj: object) -> str:
    """Canonical JSON used on every wire surface; stable across calls."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def wire_view(view: View, doc: Document, engine: ViewEngine) -> dict:
    index = engine.resolve_index(view, doc)
    paragraph = doc.paragraph_at(index)
    if paragraph is None and doc.paragraphs:
        paragraph = doc.paragraphs[-1]
        index = paragraph.index
    view_range = (
        {"start": paragraph.span.start, "end": paragraph.span.end}
        if paragraph is not None
        else {"start": 0, "end": 0}
    )
    return {
        "view_id": view.id,
        "paragraph_index": index,
        "range": view_range,
        "prompt_id": view.prompt_id,
        "status": view.status,
        "display_blocks": blocks_to_wire(parse_display(view.display_text)),
        "stale": engine.is_stale(view, doc),
    }


def wire_paragraphs(doc: Document) -> list[dict]:
    return [
        {
            "index": p.index,
            "range": {"start": p.span.start, "end": p.span.end},
            "content_hash": p.content_hash,
        }
        for p in doc.paragraphs
    ]


def wire_prompt(template: PromptTemplate) -> dict:
    return {
        "id": template.id,
        "label": template.label,
        "category": template.category,
        "body": template.body,
        "is_builtin": template.is_builtin,
    }


def sse_frame(event: str, data: object) -> str:
    return f"event: {event}\ndata: {wire_json(data)}\n\n"


def _build_provider(config: ServiceConfig) -> Provider:
    if config.use_mock:
        fixtures = load_fixtures(config.fixtures_path) if config.fixtures_path else None
        return MockProvider(fixtures)
    return OpenAIChatProvider(config.provider)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config if config is not None else ServiceConfig.from_env()
    provider = _build_provider(config)
    sessions: dict[str, Session] = {}

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if config.state_path and Path(config.state_path).exists():
            _restore_state(config.state_path)
        yield
        if config.state_path:
            _save_state(config.state_path)

    app = FastAPI(title="paraviews", lifespan=lifespan)
    app.state.config = config
    app.state.sessions = sessions
    app.state.provider = provider

    def _restore_state(path: str) -> None:
        stored = json.loads(Path(path).read_text(encoding="utf-8"))
        for entry in stored.get("sessions", []):
            session = _new_session(entry["text"], session_id=entry["id"])
            session.document = Document.from_text(
                session.id, entry["text"], version=entry.get("version", 1)
            )
            customs = json.dumps(entry.get("custom_prompts", []))
            session.prompts.import_customs(customs)

    def _save_state(path: str) -> None:
        stored = {
            "sessions": [
                {
                    "id": s.id,
                    "text": s.document.text,
                    "version": s.document.version,
                    "custom_prompts": json.loads(s.prompts.export_customs()),
                }
                for s in sessions.values()
            ]
        }
        Path(path).write_text(json.dumps(stored, indent=2), encoding="utf-8")

    def _new_session(text: str, session_id: str | None = None) -> Session:
        session_id = session_id or secrets.token_urlsafe(16)
        document = Document.from_text(session_id, text)
        engine = ViewEngine(
            provider,
            PromptSet(),
            debounce_s=config.debounce_s,
            context_budget_chars=config.provider.context_budget_chars,
        )
        session = Session(session_id, document, engine)
        sessions[session_id] = session
        return session

    def _session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def _check_size(text: str) -> None:
        if len(text.encode("utf-8")) > config.max_document_bytes:
            raise HTTPException(status_code=413, detail="document too large")

    @app.post("/sessions", status_code=201)
    async def create_session(body: CreateSessionBody) -> dict:
        _check_size(body.text)
        session = _new_session(body.text)
        onboarding = not session.document.paragraphs
        if not onboarding:
            session.keep(asyncio.create_task(session.engine.bootstrap(session.document)))
        return {
            "session_id": session.id,
            "document": {
                "id": session.document.id,
                "version": session.document.version,
                "paragraphs": wire_paragraphs(session.document),
            },
            "onboarding": onboarding,
        }

    @app.put("/sessions/{session_id}/document")
    async def update_document(session_id: str, body: UpdateDocumentBody) -> dict:
        session = _session(session_id)
        _check_size(body.text)
        current = session.document
        if body.base_version != current.version:
            raise HTTPException(
                status_code=409,
                detail={"message": "version conflict", "current_version": current.version},
            )
        updated = Document.from_text(current.id, body.text, version=current.version + 1)
        diff = diff_paragraphs(current, updated)
        session.engine.invalidate(diff.stale_hashes)
        session.document = updated
        return {
            "version": updated.version,
            "changed": sorted(diff.changed | diff.inserted),
            "deleted": sorted(diff.deleted),
            "paragraphs": wire_paragraphs(updated),
        }

    @app.post("/sessions/{session_id}/cursor")
    async def place_cursor(session_id: str, body: CursorBody) -> StreamingResponse:
        session = _session(session_id)
        doc = session.document
        if body.offset < 0 or body.offset > len(doc.text):
            raise HTTPException(status_code=422, detail="offset outside document")
        if not doc.paragraphs:
            raise HTTPException(status_code=422, detail="document has no paragraphs")

        async def stream() -> AsyncIterator[str]:
            if body.prompt_id not in session.prompts:
                yield sse_frame("error", {"detail": f"unknown prompt: {body.prompt_id}"})
                return
            template = session.prompts.get(body.prompt_id)
            scope = snap(doc, body.offset)
            session.scope = scope
            current = doc.paragraphs[scope.paragraph_index]
            yield sse_frame(
                "scope",
                {
                    "paragraph_index": scope.paragraph_index,
                    "neighborhood": list(scope.neighborhood),
                    "range": {"start": current.span.start, "end": current.span.end},
                },
            )
            queue: asyncio.Queue[EngineEvent] = asyncio.Queue()
            neighborhood = await session.engine.request_views(doc, scope, template, queue)
            if neighborhood is None:
                return  # superseded by a newer cursor placement
            outstanding = set(neighborhood.view_ids())
            while outstanding:
                event = await queue.get()
                view = event.view
                if event.kind == EVENT_DONE:
                    payload: dict = wire_view(view, session.document, session.engine)
                elif event.kind == EVENT_ERROR:
                    payload = {"view_id": view.id, "detail": view.error_detail}
                elif event.kind == EVENT_DELTA:
                    payload = {"view_id": view.id, "display_text": view.display_text}
                else:
                    payload = {
                        "view_id": view.id,
                        "paragraph_index": view.paragraph_index,
                        "prompt_id": view.prompt_id,
                    }
                yield sse_frame(event.kind, payload)
                if event.kind in (EVENT_DONE, EVENT_ERROR):
                    outstanding.discard(view.id)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/sessions/{session_id}/views")
    async def list_views(session_id: str) -> Response:
        session = _session(session_id)
        doc = session.document
        payload = {
            "document_version": doc.version,
            "views": [wire_view(v, doc, session.engine) for v in session.engine.snapshot(doc)],
        }
        # Same serializer as the SSE frames so completed views match byte
        # for byte across both surfaces.
        return Response(content=wire_json(payload), media_type="application/json")

    @app.get("/sessions/{session_id}/prompts")
    async def list_prompts(session_id: str) -> dict:
        session = _session(session_id)
        return {"prompts": [wire_prompt(p) for p in session.prompts.list()]}

    @app.post("/sessions/{session_id}/prompts", status_code=201)
    async def create_prompt(session_id: str, body: CreatePromptBody) -> dict:
        session = _session(session_id)
        try:
            template = session.prompts.add(body.label, body.body, body.category)
        except PromptValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return wire_prompt(template)

    @app.put("/sessions/{session_id}/prompts/{prompt_id}")
    async def edit_prompt(session_id: str, prompt_id: str, body: EditPromptBody) -> dict:
        session = _session(session_id)
        try:
            template = session.prompts.edit(prompt_id, body.body, body.label)
        except PromptNotFoundError:
            raise HTTPException(status_code=404, detail=f"unknown prompt: {prompt_id}")
        except PromptValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return wire_prompt(template)

    @app.get("/sessions/{session_id}/prompts/export")
    async def export_prompts(session_id: str) -> list:
        session = _session(session_id)
        return json.loads(session.prompts.export_customs())

    @app.post("/sessions/{session_id}/prompts/import")
    async def import_prompts(session_id: str, body: list[dict]) -> dict:
        session = _session(session_id)
        try:
            imported = session.prompts.import_customs(json.dumps(body))
        except PromptValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"imported": [wire_prompt(p) for p in imported]}

    if config.static_dir:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="static")

    return app
