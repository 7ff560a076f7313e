"""Command line interface: batch reports, fixture recording, and the server."""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click

from .document import Document
from .prompts import PromptSet, render
from .providers import (
    DEFAULT_CONTEXT_BUDGET,
    MockProvider,
    OpenAIChatProvider,
    ProviderConfig,
    ScriptedResponse,
    load_fixtures,
    save_fixtures,
)
from .report import build_report, render_markdown, report_has_errors
from .service import ServiceConfig, create_app

REAL_PARALLELISM = 4


def _read_source(file: str) -> tuple[str, str]:
    if file == "-":
        return sys.stdin.read(), "<stdin>"
    path = Path(file)
    return path.read_text(encoding="utf-8"), path.name


def _load_prompt_set(prompt_file: str | None) -> PromptSet:
    prompts = PromptSet()
    if prompt_file:
        prompts.import_customs(Path(prompt_file).read_text(encoding="utf-8"))
    return prompts


def _resolve_templates(prompts: PromptSet, ids_csv: str | None):
    if not ids_csv:
        return [p for p in prompts.list() if p.is_builtin]
    templates = []
    for prompt_id in [s.strip() for s in ids_csv.split(",") if s.strip()]:
        if prompt_id not in prompts:
            raise click.UsageError(f"unknown prompt id: {prompt_id}")
        templates.append(prompts.get(prompt_id))
    if not templates:
        raise click.UsageError("no prompt ids given")
    return templates


def _real_provider() -> OpenAIChatProvider:
    config = ProviderConfig.from_env()
    if not config.api_key:
        raise click.ClickException(
            "no API credential configured; set PARAVIEWS_API_KEY (or OPENAI_API_KEY), "
            "or pass --mock to run offline"
        )
    return OpenAIChatProvider(config)


@click.group()
def main() -> None:
    """Paragraph views: summaries, questions, and advice about your draft."""


@main.command()
@click.argument("file")
@click.option("--prompts", "prompt_ids", default=None, help="Comma-separated prompt ids.")
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["json", "markdown"]),
    default="json",
    show_default=True,
)
@click.option("--mock", is_flag=True, help="Use the deterministic offline provider.")
@click.option("--fixtures", default=None, help="Fixture file for the mock provider.")
@click.option(
    "--budget",
    default=DEFAULT_CONTEXT_BUDGET,
    show_default=True,
    help="Context budget in characters.",
)
@click.option("--prompt-file", default=None, help="JSON file of custom prompts to load.")
@click.option("--parallel", default=None, type=int, help="Max concurrent generations.")
@click.option("-o", "--output", default=None, help="Write the report here instead of stdout.")
def report(
    file: str,
    prompt_ids: str | None,
    output_format: str,
    mock: bool,
    fixtures: str | None,
    budget: int,
    prompt_file: str | None,
    parallel: int | None,
    output: str | None,
) -> None:
    """Generate views for every paragraph of FILE ('-' reads stdin)."""
    prompts = _load_prompt_set(prompt_file)
    templates = _resolve_templates(prompts, prompt_ids)
    text, source = _read_source(file)
    doc = Document.from_text(source, text)

    if mock:
        provider = MockProvider(load_fixtures(fixtures) if fixtures else None)
        max_parallel = parallel if parallel is not None else 1
    else:
        provider = _real_provider()
        max_parallel = parallel if parallel is not None else REAL_PARALLELISM

    result = asyncio.run(
        build_report(
            doc,
            source,
            templates,
            provider,
            context_budget_chars=budget,
            max_parallel=max_parallel,
        )
    )

    if output_format == "json":
        rendered = json.dumps(result, indent=2, sort_keys=True, ensure_ascii=True) + "\n"
    else:
        rendered = render_markdown(result, prompts)

    if output:
        Path(output).write_text(rendered, encoding="utf-8")
    else:
        click.echo(rendered, nl=False)

    if report_has_errors(result):
        sys.exit(1)


@main.command("record-fixtures")
@click.argument("file")
@click.option("--output", "-o", required=True, help="Fixture file to write.")
@click.option("--prompts", "prompt_ids", default=None, help="Comma-separated prompt ids.")
@click.option("--budget", default=DEFAULT_CONTEXT_BUDGET, show_default=True)
@click.option("--prompt-file", default=None, help="JSON file of custom prompts to load.")
def record_fixtures(
    file: str,
    output: str,
    prompt_ids: str | None,
    budget: int,
    prompt_file: str | None,
) -> None:
    """Capture real provider streams for FILE so --mock can replay them."""
    prompts = _load_prompt_set(prompt_file)
    templates = _resolve_templates(prompts, prompt_ids)
    text, source = _read_source(file)
    doc = Document.from_text(source, text)
    provider = _real_provider()

    async def record() -> dict[str, ScriptedResponse]:
        captured: dict[str, ScriptedResponse] = {}
        for paragraph in doc.paragraphs:
            for template in templates:
                request = render(template, paragraph.text, context_budget_chars=budget)
                fingerprint = request.fingerprint()
                if fingerprint in captured:
                    continue
                chunks: list[str] = []
                terminal = "done"
                detail = ""
                async for event in provider.stream(request):
                    if event.kind == "delta":
                        chunks.append(event.text)
                    elif event.kind == "error":
                        terminal = "error"
                        detail = event.text
                captured[fingerprint] = ScriptedResponse(
                    chunks=chunks, terminal=terminal, error_detail=detail or "scripted error"
                )
        return captured

    captured = asyncio.run(record())
    save_fixtures(captured, output)
    click.echo(f"recorded {len(captured)} fixtures to {output}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True)
@click.option("--mock", is_flag=True, help="Serve with the deterministic offline provider.")
@click.option("--fixtures", default=None, help="Fixture file for the mock provider.")
@click.option("--static-dir", default=None, help="Directory of editor assets to serve at /.")
@click.option("--state", default=None, help="Persist sessions to this file on shutdown.")
@click.option("--debounce", default=None, type=float, help="Cursor debounce in seconds.")
def serve(
    host: str,
    port: int,
    mock: bool,
    fixtures: str | None,
    static_dir: str | None,
    state: str | None,
    debounce: float | None,
) -> None:
    """Run the HTTP service."""
    import uvicorn

    config = ServiceConfig.from_env()
    if mock:
        config.use_mock = True
    if fixtures:
        config.fixtures_path = fixtures
    if static_dir:
        config.static_dir = static_dir
    if state:
        config.state_path = state
    if debounce is not None:
        config.debounce_s = debounce
    if not config.use_mock and not config.provider.api_key:
        raise click.ClickException(
            "no API credential configured; set PARAVIEWS_API_KEY (or OPENAI_API_KEY), "
            "or pass --mock to run offline"
        )
    uvicorn.run(create_app(config), host=host, port=port)


if __name__ == "__main__":
    main()
