"""Chat-completion provider abstraction with token streaming.

Two implementations: an OpenAI-compatible HTTP client and a deterministic
mock driven by replayable fixtures. Both emit the same event stream: zero or
more deltas followed by exactly one terminal (done or error) event.
"""

from __future__ import annotations

import asyncio
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import AsyncIterator, Iterable, Mapping, Protocol

import httpx

FILTER_NONE = "none"
FILTER_FINAL_OUTPUT = "final_output"

DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_MODEL = "gpt-3.5-turbo"
DEFAULT_CONTEXT_BUDGET = 8000  # chars; ~budget/4 tokens
DEFAULT_MAX_OUTPUT_TOKENS = 512
DEFAULT_TEMPERATURE = 0.7

_FALLBACK_CHUNK = 24
_SENTENCE_END = ".!?"
_CLOSERS = "\"')]}"


@dataclass(frozen=True)
class ProviderRequest:
    instruction: str
    context: str
    truncated: bool = False
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    temperature: float = DEFAULT_TEMPERATURE
    filter: str = FILTER_NONE

    def __post_init__(self) -> None:
        if not self.instruction:
            raise ValueError("instruction must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.instruction.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(self.context.encode("utf-8"))
        return digest.hexdigest()


@dataclass(frozen=True)
class StreamEvent:
    kind: str  # delta | done | error
    text: str = ""
    retryable: bool = False

    @property
    def is_terminal(self) -> bool:
        return self.kind in ("done", "error")


@dataclass(repr=False)
class ProviderConfig:
    endpoint: str = DEFAULT_ENDPOINT
    model: str = DEFAULT_MODEL
    api_key: str = ""
    context_budget_chars: int = DEFAULT_CONTEXT_BUDGET
    timeout_s: float = 60.0
    retries: int = 1
    retry_backoff_s: float = 1.0

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> ProviderConfig:
        env = os.environ if env is None else env
        config = cls(
            endpoint=env.get("PARAVIEWS_ENDPOINT", DEFAULT_ENDPOINT),
            model=env.get("PARAVIEWS_MODEL", DEFAULT_MODEL),
            api_key=env.get("PARAVIEWS_API_KEY") or env.get("OPENAI_API_KEY") or "",
        )
        if "PARAVIEWS_CONTEXT_BUDGET" in env:
            config.context_budget_chars = int(env["PARAVIEWS_CONTEXT_BUDGET"])
        return config

    def __repr__(self) -> str:
        key = "***" if self.api_key else ""
        return (
            f"ProviderConfig(endpoint={self.endpoint!r}, model={self.model!r}, "
            f"api_key={key!r}, context_budget_chars={self.context_budget_chars}, "
            f"timeout_s={self.timeout_s}, retries={self.retries})"
        )

    def as_public_dict(self) -> dict:
        """Serializable view of the config; never includes the credential."""
        return {
            "endpoint": self.endpoint,
            "model": self.model,
            "context_budget_chars": self.context_budget_chars,
            "timeout_s": self.timeout_s,
            "retries": self.retries,
        }


def estimate_and_truncate(text: str, budget_chars: int) -> tuple[str, bool]:
    """Fit text into the character budget, preferring a sentence boundary.

    Cuts after the last sentence-ending punctuation (followed by whitespace
    or a closing quote/bracket) inside the budget window; falls back to a
    hard cut when none exists.
    """
    if budget_chars <= 0:
        raise ValueError("budget_chars must be positive")
    if len(text) <= budget_chars:
        return text, False
    cut = budget_chars
    for i in range(budget_chars - 1, -1, -1):
        if text[i] in _SENTENCE_END and (text[i + 1].isspace() or text[i + 1] in _CLOSERS):
            cut = i + 1
            break
    return text[:cut], True


class Provider(Protocol):
    """Anything that can stream a completion for a request."""

    def stream(self, request: ProviderRequest) -> AsyncIterator[StreamEvent]: ...


@dataclass
class ScriptedResponse:
    """One mock completion: chunk sequence, terminal kind, optional pacing."""

    chunks: list[str]
    terminal: str = "done"  # done | error
    delays_ms: list[int] = field(default_factory=list)
    error_detail: str = "scripted error"

    @property
    def text(self) -> str:
        return "".join(self.chunks)


class MockProvider:
    """Deterministic provider for tests and offline use.

    Known request fingerprints replay their scripted response; unknown ones
    fall back to a deterministic echo of the request context. Every stream()
    invocation is appended to ``calls``.
    """

    def __init__(self, fixtures: Mapping[str, ScriptedResponse] | None = None):
        self.fixtures: dict[str, ScriptedResponse] = dict(fixtures or {})
        self.calls: list[ProviderRequest] = []

    def script(self, request: ProviderRequest, response: ScriptedResponse) -> None:
        self.fixtures[request.fingerprint()] = response

    def _fallback(self, request: ProviderRequest) -> ScriptedResponse:
        text = f"OBSERVATION: {request.context}"
        chunks = [text[i : i + _FALLBACK_CHUNK] for i in range(0, len(text), _FALLBACK_CHUNK)]
        return ScriptedResponse(chunks=chunks or [""])

    async def stream(self, request: ProviderRequest) -> AsyncIterator[StreamEvent]:
        self.calls.append(request)
        script = self.fixtures.get(request.fingerprint())
        if script is None:
            script = self._fallback(request)
        for i, chunk in enumerate(script.chunks):
            delay_ms = script.delays_ms[i] if i < len(script.delays_ms) else 0
            await asyncio.sleep(delay_ms / 1000.0)
            yield StreamEvent("delta", chunk)
        if script.terminal == "error":
            yield StreamEvent("error", script.error_detail)
        else:
            yield StreamEvent("done")


def load_fixtures(path: str | Path) -> dict[str, ScriptedResponse]:
    """Read a fixture file: JSON array of fingerprint/chunks/terminal/delays_ms."""
    entries = json.loads(Path(path).read_text(encoding="utf-8"))
    fixtures: dict[str, ScriptedResponse] = {}
    for entry in entries:
        fixtures[entry["fingerprint"]] = ScriptedResponse(
            chunks=list(entry["chunks"]),
            terminal=entry.get("terminal", "done"),
            delays_ms=list(entry.get("delays_ms", [])),
            error_detail=entry.get("error_detail", "scripted error"),
        )
    return fixtures


def save_fixtures(fixtures: Mapping[str, ScriptedResponse], path: str | Path) -> None:
    entries = []
    for fingerprint, script in sorted(fixtures.items()):
        entry: dict = {
            "fingerprint": fingerprint,
            "chunks": list(script.chunks),
            "terminal": script.terminal,
            "delays_ms": list(script.delays_ms),
        }
        if script.terminal == "error":
            entry["error_detail"] = script.error_detail
        entries.append(entry)
    Path(path).write_text(json.dumps(entries, indent=2, sort_keys=True), encoding="utf-8")


def iter_sse_data(lines: Iterable[str]) -> Iterable[str]:
    """Yield the data payloads of an SSE byte-line stream, skipping keepalives."""
    for line in lines:
        line = line.strip()
        if line.startswith("data:"):
            payload = line[len("data:"):].strip()
            if payload:
                yield payload


def extract_delta(payload: str) -> str | None:
    """Pull the content delta out of one chat-completion stream payload."""
    if payload == "[DONE]":
        return None
    try:
        data = json.loads(payload)
    except json.JSONDecodeError:
        return None
    choices = data.get("choices") or []
    if not choices:
        return None
    return (choices[0].get("delta") or {}).get("content")


class OpenAIChatProvider:
    """Streams completions from any OpenAI-compatible chat endpoint.

    The request is sent as two messages (system carries the instruction,
    user carries the context). Errors before the first delta are retried up
    to the configured count when retryable.
    """

    def __init__(self, config: ProviderConfig, client: httpx.AsyncClient | None = None):
        self.config = config
        self._client = client

    def _payload(self, request: ProviderRequest) -> dict:
        return {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": request.instruction},
                {"role": "user", "content": request.context},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
            "stream": True,
        }

    async def stream(self, request: ProviderRequest) -> AsyncIterator[StreamEvent]:
        if len(request.context) > self.config.context_budget_chars:
            yield StreamEvent(
                "error",
                f"context length {len(request.context)} exceeds budget "
                f"{self.config.context_budget_chars}",
            )
            return
        attempts = self.config.retries + 1
        for attempt in range(attempts):
            emitted = False
            final: StreamEvent | None = None
            async for event in self._attempt(request):
                if event.kind == "delta":
                    emitted = True
                    yield event
                else:
                    final = event
            assert final is not None
            if final.kind == "error" and final.retryable and not emitted and attempt < attempts - 1:
                await asyncio.sleep(min(self.config.retry_backoff_s * 2**attempt, 8.0))
                continue
            yield final
            return

    async def _attempt(self, request: ProviderRequest) -> AsyncIterator[StreamEvent]:
        client = self._client or httpx.AsyncClient(timeout=self.config.timeout_s)
        owns_client = self._client is None
        headers = {"Authorization": f"Bearer {self.config.api_key}"}
        try:
            async with client.stream(
                "POST", self.config.endpoint, json=self._payload(request), headers=headers
            ) as response:
                if response.status_code != 200:
                    await response.aread()
                    if response.status_code in (401, 403):
                        yield StreamEvent("error", "authentication failed; check credentials")
                    else:
                        retryable = response.status_code == 429 or response.status_code >= 500
                        yield StreamEvent(
                            "error",
                            f"provider returned HTTP {response.status_code}",
                            retryable=retryable,
                        )
                    return
                async for payload in _aiter_sse(response):
                    delta = extract_delta(payload)
                    if delta:
                        yield StreamEvent("delta", delta)
                yield StreamEvent("done")
        except httpx.TimeoutException:
            yield StreamEvent("error", "provider request timed out", retryable=True)
        except httpx.HTTPError as exc:
            yield StreamEvent("error", f"provider connection failed: {exc}", retryable=True)
        finally:
            if owns_client:
                await client.aclose()


async def _aiter_sse(response: httpx.Response) -> AsyncIterator[str]:
    async for line in response.aiter_lines():
        line = line.strip()
        if line.startswith("data:"):
            payload = line[len("data:"):].strip()
            if payload:
                yield payload
