"""View generation engine.

Schedules paragraph views around the cursor, deduplicates identical in-flight
work, caches completed views by paragraph content, and publishes lifecycle
events to per-request subscriber queues.
"""

from __future__ import annotations

import asyncio
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .document import CursorScope, Document, Paragraph
from .filtering import filter_final_output
from .prompts import PromptSet, PromptTemplate, render
from .providers import (
    DEFAULT_CONTEXT_BUDGET,
    DEFAULT_MAX_OUTPUT_TOKENS,
    DEFAULT_TEMPERATURE,
    FILTER_FINAL_OUTPUT,
    Provider,
    ProviderRequest,
)

STATUS_PENDING = "pending"
STATUS_STREAMING = "streaming"
STATUS_COMPLETE = "complete"
STATUS_ERROR = "error"
STATUS_CANCELLED = "cancelled"

EVENT_PENDING = "view_pending"
EVENT_DELTA = "view_delta"
EVENT_DONE = "view_done"
EVENT_ERROR = "view_error"

CANCELLED_DETAIL = "cancelled"


@dataclass
class View:
    """One generated observation about one paragraph."""

    id: str
    paragraph_index: int
    content_hash: str
    prompt_id: str
    status: str = STATUS_PENDING
    raw_text: str = ""
    display_text: str = ""
    error_detail: str = ""
    created_at: float = 0.0
    seq: int = 0

    @property
    def is_terminal(self) -> bool:
        return self.status in (STATUS_COMPLETE, STATUS_ERROR, STATUS_CANCELLED)


@dataclass(frozen=True)
class EngineEvent:
    kind: str
    view: View


@dataclass(frozen=True)
class Neighborhood:
    """Views for the cursor paragraph and its immediate neighbors."""

    current_index: int
    entries: tuple[tuple[int, tuple[View, ...]], ...]

    def view_ids(self) -> list[str]:
        return [v.id for _, views in self.entries for v in views]


class ViewCache:
    """Completed views keyed by paragraph content, prompt, and request."""

    def __init__(self) -> None:
        self._entries: dict[tuple[str, str, str], View] = {}

    def get(self, key: tuple[str, str, str]) -> View | None:
        return self._entries.get(key)

    def put(self, key: tuple[str, str, str], view: View) -> None:
        if view.status != STATUS_COMPLETE:
            raise ValueError("only complete views are cacheable")
        self._entries[key] = view

    def drop_hashes(self, stale_hashes: Iterable[str]) -> int:
        stale = set(stale_hashes)
        doomed = [k for k in self._entries if k[0] in stale]
        for key in doomed:
            del self._entries[key]
        return len(doomed)

    def __len__(self) -> int:
        return len(self._entries)


class _Generation:
    """One in-flight provider stream plus everyone listening to it."""

    def __init__(self, key: tuple[str, str, str], view: View, request: ProviderRequest):
        self.key = key
        self.view = view
        self.request = request
        self.subscribers: list[asyncio.Queue] = []
        self.task: asyncio.Task | None = None

    def attach(self, queue: asyncio.Queue | None) -> None:
        if queue is not None and queue not in self.subscribers:
            self.subscribers.append(queue)

    def publish(self, event: EngineEvent, only: asyncio.Queue | None = None) -> None:
        targets = [only] if only is not None else self.subscribers
        for queue in targets:
            queue.put_nowait(event)


class ViewEngine:
    def __init__(
        self,
        provider: Provider,
        prompts: PromptSet | None = None,
        *,
        clock: Callable[[], float] = time.time,
        debounce_s: float = 0.0,
        context_budget_chars: int = DEFAULT_CONTEXT_BUDGET,
        max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS,
        temperature: float = DEFAULT_TEMPERATURE,
    ):
        self.provider = provider
        self.prompts = prompts if prompts is not None else PromptSet()
        self.clock = clock
        self.debounce_s = debounce_s
        self.context_budget_chars = context_budget_chars
        self.max_output_tokens = max_output_tokens
        self.temperature = temperature
        self.cache = ViewCache()
        self.views: dict[str, View] = {}
        self._inflight: dict[tuple[str, str, str], _Generation] = {}
        self._seq = 0
        self._latest_request = 0

    def _next_view(self, paragraph: Paragraph, prompt_id: str) -> View:
        self._seq += 1
        view = View(
            id=f"v{self._seq}",
            paragraph_index=paragraph.index,
            content_hash=paragraph.content_hash,
            prompt_id=prompt_id,
            created_at=self.clock(),
            seq=self._seq,
        )
        self.views[view.id] = view
        return view

    def _render(self, template: PromptTemplate, paragraph: Paragraph) -> ProviderRequest:
        return render(
            template,
            paragraph.text,
            context_budget_chars=self.context_budget_chars,
            max_output_tokens=self.max_output_tokens,
            temperature=self.temperature,
        )

    def _ensure_view(
        self,
        paragraph: Paragraph,
        template: PromptTemplate,
        queue: asyncio.Queue | None,
    ) -> View:
        """Serve from cache, join the in-flight generation, or start one."""
        request = self._render(template, paragraph)
        key = (paragraph.content_hash, template.id, request.fingerprint())

        cached = self.cache.get(key)
        if cached is not None:
            # Replay the lifecycle so every subscriber sees pending -> done.
            if queue is not None:
                queue.put_nowait(EngineEvent(EVENT_PENDING, cached))
                queue.put_nowait(EngineEvent(EVENT_DONE, cached))
            return cached

        generation = self._inflight.get(key)
        if generation is not None:
            generation.attach(queue)
            if queue is not None:
                generation.publish(EngineEvent(EVENT_PENDING, generation.view), only=queue)
            return generation.view

        view = self._next_view(paragraph, template.id)
        generation = _Generation(key, view, request)
        generation.attach(queue)
        self._inflight[key] = generation
        generation.publish(EngineEvent(EVENT_PENDING, view))
        generation.task = asyncio.create_task(self._run(generation))
        return view

    async def _run(self, generation: _Generation) -> None:
        view = generation.view
        filter_enabled = generation.request.filter == FILTER_FINAL_OUTPUT
        try:
            async for event in self.provider.stream(generation.request):
                if event.kind == "delta":
                    view.raw_text += event.text
                    view.status = STATUS_STREAMING
                    view.display_text = filter_final_output(view.raw_text, filter_enabled)
                    generation.publish(EngineEvent(EVENT_DELTA, view))
                elif event.kind == "done":
                    view.status = STATUS_COMPLETE
                    view.display_text = filter_final_output(view.raw_text, filter_enabled)
                    self.cache.put(generation.key, view)
                    generation.publish(EngineEvent(EVENT_DONE, view))
                    return  # leave _inflight before any further await
                else:
                    view.status = STATUS_ERROR
                    view.error_detail = event.text
                    generation.publish(EngineEvent(EVENT_ERROR, view))
                    return
        except asyncio.CancelledError:
            view.status = STATUS_CANCELLED
            view.error_detail = CANCELLED_DETAIL
            generation.publish(EngineEvent(EVENT_ERROR, view))
            raise
        finally:
            self._inflight.pop(generation.key, None)

    async def bootstrap(self, doc: Document, queue: asyncio.Queue | None = None) -> View | None:
        """Kick off the default view for the opening paragraph, if any."""
        if not doc.paragraphs:
            return None
        template = self.prompts.get("thesis")
        return self._ensure_view(doc.paragraphs[0], template, queue)

    async def request_views(
        self,
        doc: Document,
        scope: CursorScope,
        template: PromptTemplate,
        queue: asyncio.Queue | None = None,
    ) -> Neighborhood | None:
        """Schedule views for the scope's neighborhood; None when superseded.

        Work is issued for the cursor paragraph first, then following
        neighbors, then preceding ones. A non-zero debounce makes rapid
        successive calls coalesce: only the latest proceeds.
        """
        self._latest_request += 1
        token = self._latest_request
        if self.debounce_s > 0:
            await asyncio.sleep(self.debounce_s)
            if token != self._latest_request:
                return None

        current = scope.paragraph_index
        following = [i for i in scope.neighborhood if i > current]
        preceding = [i for i in scope.neighborhood if i < current]
        preceding.reverse()  # nearest neighbor first

        by_index: dict[int, View] = {}
        for index in [current, *following, *preceding]:
            paragraph = doc.paragraphs[index]
            by_index[index] = self._ensure_view(paragraph, template, queue)
        entries = tuple(
            (index, (by_index[index],)) for index in sorted(by_index)
        )
        return Neighborhood(current_index=current, entries=entries)

    def invalidate(self, stale_hashes: Iterable[str]) -> int:
        """Evict cached views and cancel in-flight work for stale content."""
        stale = set(stale_hashes)
        dropped = self.cache.drop_hashes(stale)
        for generation in list(self._inflight.values()):
            if generation.view.content_hash in stale and generation.task is not None:
                generation.task.cancel()
        return dropped

    async def drain(self) -> None:
        """Wait until no generation is in flight."""
        while self._inflight:
            tasks = [g.task for g in self._inflight.values() if g.task is not None]
            if not tasks:
                break
            await asyncio.gather(*tasks, return_exceptions=True)

    def snapshot(self, doc: Document) -> list[View]:
        """Current best view per (paragraph, prompt), newest generation wins.

        Views whose content no longer appears in the document are kept and
        reported at their recorded index so callers can flag them stale.
        """
        hash_to_index = {p.content_hash: p.index for p in doc.paragraphs}
        best: dict[tuple[int, str], View] = {}
        for view in sorted(self.views.values(), key=lambda v: v.seq):
            if view.status == STATUS_CANCELLED:
                continue
            index = hash_to_index.get(view.content_hash, view.paragraph_index)
            best[(index, view.prompt_id)] = view
        return [best[key] for key in sorted(best)]

    def is_stale(self, view: View, doc: Document) -> bool:
        return all(p.content_hash != view.content_hash for p in doc.paragraphs)

    def resolve_index(self, view: View, doc: Document) -> int:
        """Index the view should display at in the current document."""
        at_recorded = doc.paragraph_at(view.paragraph_index)
        if at_recorded is not None and at_recorded.content_hash == view.content_hash:
            return view.paragraph_index
        for paragraph in doc.paragraphs:
            if paragraph.content_hash == view.content_hash:
                return paragraph.index
        return view.paragraph_index
