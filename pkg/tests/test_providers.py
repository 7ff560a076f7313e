import json

import httpx
import pytest

from paraviews.providers import (
    FILTER_FINAL_OUTPUT,
    MockProvider,
    OpenAIChatProvider,
    ProviderConfig,
    ProviderRequest,
    ScriptedResponse,
    StreamEvent,
    estimate_and_truncate,
    extract_delta,
    iter_sse_data,
    load_fixtures,
    save_fixtures,
)

pytestmark = pytest.mark.anyio


def make_request(context="some paragraph", instruction="observe") -> ProviderRequest:
    return ProviderRequest(instruction=instruction, context=context)


async def collect(provider, request) -> list[StreamEvent]:
    return [event async for event in provider.stream(request)]


# --- request and config ----------------------------------------------------


async def test_fingerprint_stable_and_boundary_safe():
    a = ProviderRequest(instruction="ab", context="c")
    b = ProviderRequest(instruction="a", context="bc")
    assert a.fingerprint() == a.fingerprint()
    assert a.fingerprint() != b.fingerprint()
    assert len(a.fingerprint()) == 64


async def test_request_validation():
    with pytest.raises(ValueError):
        ProviderRequest(instruction="", context="x")
    with pytest.raises(ValueError):
        ProviderRequest(instruction="i", context="x", temperature=2.5)
    ProviderRequest(instruction="i", context="x", temperature=0.0)
    ProviderRequest(instruction="i", context="x", temperature=2.0)


async def test_config_never_reveals_credential():
    config = ProviderConfig(api_key="sk-supersecret123")
    assert "sk-supersecret123" not in repr(config)
    assert "sk-supersecret123" not in str(config)
    assert "api_key" not in config.as_public_dict()
    assert "sk-supersecret123" not in json.dumps(config.as_public_dict())


async def test_config_from_env_precedence():
    config = ProviderConfig.from_env({"PARAVIEWS_API_KEY": "a", "OPENAI_API_KEY": "b"})
    assert config.api_key == "a"
    config = ProviderConfig.from_env({"OPENAI_API_KEY": "b"})
    assert config.api_key == "b"
    config = ProviderConfig.from_env({"PARAVIEWS_CONTEXT_BUDGET": "1234"})
    assert config.context_budget_chars == 1234


# --- truncation -------------------------------------------------------------


async def test_truncate_short_text_unchanged():
    assert estimate_and_truncate("short", 100) == ("short", False)


async def test_truncate_exact_budget_unchanged():
    text = "x" * 50
    assert estimate_and_truncate(text, 50) == (text, False)


async def test_truncate_prefers_sentence_boundary():
    text = "First sentence. Second sentence. Third one that is long."
    cut, truncated = estimate_and_truncate(text, 40)
    assert truncated
    assert cut == "First sentence. Second sentence."


async def test_truncate_boundary_with_closing_quote():
    text = 'He said "stop." Then he left the building without a word at all.'
    cut, truncated = estimate_and_truncate(text, 30)
    assert truncated
    assert cut.endswith(".")
    assert len(cut) <= 30


async def test_truncate_hard_cut_without_boundary():
    text = "no sentence ending here just words " * 5
    cut, truncated = estimate_and_truncate(text, 25)
    assert truncated
    assert len(cut) == 25


async def test_truncate_rejects_bad_budget():
    with pytest.raises(ValueError):
        estimate_and_truncate("x", 0)


# --- mock provider ----------------------------------------------------------


async def test_mock_fallback_is_deterministic_echo():
    provider = MockProvider()
    request = make_request("hello paragraph")
    first = await collect(provider, request)
    second = await collect(provider, request)
    assert first == second
    assert first[-1].kind == "done"
    text = "".join(e.text for e in first if e.kind == "delta")
    assert text == "OBSERVATION: hello paragraph"


async def test_mock_scripted_replay_and_call_log():
    provider = MockProvider()
    request = make_request("scripted")
    provider.script(request, ScriptedResponse(chunks=["Hel", "lo"], delays_ms=[0, 1]))
    events = await collect(provider, request)
    assert [e.kind for e in events] == ["delta", "delta", "done"]
    assert "".join(e.text for e in events[:-1]) == "Hello"
    assert len(provider.calls) == 1
    assert provider.calls[0] is request


async def test_mock_exactly_one_terminal_event():
    provider = MockProvider()
    request = make_request("terminal check")
    provider.script(request, ScriptedResponse(chunks=["a"], terminal="error"))
    events = await collect(provider, request)
    assert sum(1 for e in events if e.is_terminal) == 1
    assert events[-1].kind == "error"
    assert events[-1].text == "scripted error"


async def test_fixture_file_round_trip(tmp_path):
    fixtures = {
        "f" * 64: ScriptedResponse(chunks=["a", "b"], delays_ms=[5]),
        "0" * 64: ScriptedResponse(chunks=[], terminal="error", error_detail="boom"),
    }
    path = tmp_path / "fixtures.json"
    save_fixtures(fixtures, path)
    loaded = load_fixtures(path)
    assert loaded.keys() == fixtures.keys()
    assert loaded["f" * 64].chunks == ["a", "b"]
    assert loaded["f" * 64].delays_ms == [5]
    assert loaded["0" * 64].terminal == "error"
    assert loaded["0" * 64].error_detail == "boom"

    provider = MockProvider(loaded)
    request = make_request("anything else")
    events = await collect(provider, request)
    assert events[-1].kind == "done"  # unknown fingerprint falls back


# --- SSE payload parsing ----------------------------------------------------


async def test_iter_sse_data_skips_noise():
    lines = ["", ": keepalive", "data: one", "data:", "event: x", "data: [DONE]"]
    assert list(iter_sse_data(lines)) == ["one", "[DONE]"]


async def test_extract_delta():
    payload = json.dumps({"choices": [{"delta": {"content": "hi"}}]})
    assert extract_delta(payload) == "hi"
    assert extract_delta("[DONE]") is None
    assert extract_delta("not json") is None
    assert extract_delta(json.dumps({"choices": []})) is None
    assert extract_delta(json.dumps({"choices": [{"delta": {}}]})) is None


# --- HTTP provider ----------------------------------------------------------


def sse_body(*chunks: str) -> bytes:
    lines = []
    for chunk in chunks:
        lines.append("data: " + json.dumps({"choices": [{"delta": {"content": chunk}}]}))
        lines.append("")
    lines.extend(["data: [DONE]", ""])
    return "\n".join(lines).encode()


async def test_http_provider_streams_deltas():
    def handler(req: httpx.Request) -> httpx.Response:
        body = json.loads(req.content)
        assert body["stream"] is True
        assert body["messages"][0]["role"] == "system"
        assert body["messages"][1]["content"] == "some paragraph"
        assert req.headers["authorization"] == "Bearer sk-test"
        return httpx.Response(200, content=sse_body("Hel", "lo"))

    client = httpx.AsyncClient(transport=httpx.MockTransport(handler))
    provider = OpenAIChatProvider(ProviderConfig(api_key="sk-test"), client=client)
    events = await collect(provider, make_request())
    assert [e.kind for e in events] == ["delta", "delta", "done"]
    assert "".join(e.text for e in events[:-1]) == "Hello"
    await client.aclose()


async def test_http_provider_rejects_overlong_context_without_network():
    def handler(req: httpx.Request) -> httpx.Response:
        raise AssertionError("must not reach the network")

    client = httpx.AsyncClient(transport=httpx.MockTransport(handler))
    config = ProviderConfig(api_key="k", context_budget_chars=10)
    provider = OpenAIChatProvider(config, client=client)
    events = await collect(provider, make_request("x" * 11))
    assert [e.kind for e in events] == ["error"]
    assert "budget" in events[0].text
    await client.aclose()


async def test_http_provider_auth_error_is_not_retried():
    attempts = 0

    def handler(req: httpx.Request) -> httpx.Response:
        nonlocal attempts
        attempts += 1
        return httpx.Response(401, content=b"{}")

    client = httpx.AsyncClient(transport=httpx.MockTransport(handler))
    provider = OpenAIChatProvider(ProviderConfig(api_key="bad", retries=3), client=client)
    events = await collect(provider, make_request())
    assert [e.kind for e in events] == ["error"]
    assert not events[0].retryable
    assert attempts == 1
    await client.aclose()


async def test_http_provider_retries_server_error_then_succeeds():
    attempts = 0

    def handler(req: httpx.Request) -> httpx.Response:
        nonlocal attempts
        attempts += 1
        if attempts == 1:
            return httpx.Response(500, content=b"{}")
        return httpx.Response(200, content=sse_body("ok"))

    client = httpx.AsyncClient(transport=httpx.MockTransport(handler))
    provider = OpenAIChatProvider(
        ProviderConfig(api_key="k", retries=1, retry_backoff_s=0.0), client=client
    )
    events = await collect(provider, make_request())
    assert attempts == 2
    assert [e.kind for e in events] == ["delta", "done"]
    await client.aclose()


async def test_http_provider_gives_up_after_retry_budget():
    attempts = 0

    def handler(req: httpx.Request) -> httpx.Response:
        nonlocal attempts
        attempts += 1
        return httpx.Response(503, content=b"{}")

    client = httpx.AsyncClient(transport=httpx.MockTransport(handler))
    provider = OpenAIChatProvider(
        ProviderConfig(api_key="k", retries=1, retry_backoff_s=0.0), client=client
    )
    events = await collect(provider, make_request())
    assert attempts == 2
    assert [e.kind for e in events] == ["error"]
    assert events[0].retryable
    await client.aclose()


async def test_http_provider_timeout_becomes_retryable_error():
    def handler(req: httpx.Request) -> httpx.Response:
        raise httpx.ReadTimeout("slow")

    client = httpx.AsyncClient(transport=httpx.MockTransport(handler))
    provider = OpenAIChatProvider(ProviderConfig(api_key="k", retries=0), client=client)
    events = await collect(provider, make_request())
    assert [e.kind for e in events] == ["error"]
    assert events[0].retryable
    assert "timed out" in events[0].text
    await client.aclose()


async def test_filter_flag_travels_on_request():
    request = ProviderRequest(instruction="i", context="c", filter=FILTER_FINAL_OUTPUT)
    assert request.filter == FILTER_FINAL_OUTPUT
