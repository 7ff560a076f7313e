"""Batch view reports over a whole document.

Generates every requested view for every paragraph and assembles a
deterministic report: no timestamps, no absolute paths, stable ordering,
canonical JSON. Identical paragraphs share one generation.
"""

from __future__ import annotations

import asyncio
from typing import Sequence

from .document import Document
from .filtering import filter_final_output
from .markdown import (
    ORDERED_LIST,
    PARAGRAPH,
    UNORDERED_LIST,
    blocks_to_wire,
    parse_display,
)
from .prompts import PromptSet, PromptTemplate, render
from .providers import DEFAULT_CONTEXT_BUDGET, FILTER_FINAL_OUTPUT, Provider

REPORT_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["report_version", "source", "paragraph_count", "prompts", "paragraphs"],
    "additionalProperties": False,
    "properties": {
        "report_version": {"const": REPORT_VERSION},
        "source": {"type": "string"},
        "paragraph_count": {"type": "integer", "minimum": 0},
        "prompts": {"type": "array", "items": {"type": "string"}},
        "paragraphs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "range", "content_hash", "views"],
                "additionalProperties": False,
                "properties": {
                    "index": {"type": "integer", "minimum": 0},
                    "range": {
                        "type": "object",
                        "required": ["start", "end"],
                        "additionalProperties": False,
                        "properties": {
                            "start": {"type": "integer", "minimum": 0},
                            "end": {"type": "integer", "minimum": 0},
                        },
                    },
                    "content_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
                    "views": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": [
                                "prompt_id",
                                "status",
                                "display_text",
                                "display_blocks",
                                "error_detail",
                            ],
                            "additionalProperties": False,
                            "properties": {
                                "prompt_id": {"type": "string"},
                                "status": {"enum": ["complete", "error"]},
                                "display_text": {"type": "string"},
                                "display_blocks": {"type": "array"},
                                "error_detail": {"type": "string"},
                            },
                        },
                    },
                },
            },
        },
    },
}


async def _generate_one(provider: Provider, template: PromptTemplate, request) -> dict:
    raw: list[str] = []
    status = "error"
    detail = "provider stream ended without a terminal event"
    async for event in provider.stream(request):
        if event.kind == "delta":
            raw.append(event.text)
        elif event.kind == "done":
            status = "complete"
            detail = ""
        else:
            status = "error"
            detail = event.text
    display = filter_final_output("".join(raw), request.filter == FILTER_FINAL_OUTPUT)
    return {
        "prompt_id": template.id,
        "status": status,
        "display_text": display if status == "complete" else "",
        "display_blocks": blocks_to_wire(parse_display(display)) if status == "complete" else [],
        "error_detail": detail,
    }


async def build_report(
    doc: Document,
    source: str,
    templates: Sequence[PromptTemplate],
    provider: Provider,
    *,
    context_budget_chars: int = DEFAULT_CONTEXT_BUDGET,
    max_parallel: int = 1,
) -> dict:
    """Run every template over every paragraph and assemble the report."""
    semaphore = asyncio.Semaphore(max(1, max_parallel))

    async def bounded(template: PromptTemplate, request) -> dict:
        async with semaphore:
            return await _generate_one(provider, template, request)

    # One generation per distinct (content, prompt); duplicates share it.
    jobs: dict[tuple[str, str, str], asyncio.Task] = {}
    slots: list[tuple[int, tuple[str, str, str]]] = []
    for paragraph in doc.paragraphs:
        for template in templates:
            request = render(template, paragraph.text, context_budget_chars=context_budget_chars)
            key = (paragraph.content_hash, template.id, request.fingerprint())
            if key not in jobs:
                jobs[key] = asyncio.create_task(bounded(template, request))
            slots.append((paragraph.index, key))

    results = {key: await task for key, task in jobs.items()}

    by_index: dict[int, list[dict]] = {p.index: [] for p in doc.paragraphs}
    for index, key in slots:
        by_index[index].append(results[key])
    return {
        "report_version": REPORT_VERSION,
        "source": source,
        "paragraph_count": len(doc.paragraphs),
        "prompts": [t.id for t in templates],
        "paragraphs": [
            {
                "index": p.index,
                "range": {"start": p.span.start, "end": p.span.end},
                "content_hash": p.content_hash,
                "views": by_index[p.index],
            }
            for p in doc.paragraphs
        ],
    }


def report_has_errors(report: dict) -> bool:
    return any(
        view["status"] != "complete"
        for paragraph in report["paragraphs"]
        for view in paragraph["views"]
    )


def _spans_to_markdown(spans: list[dict]) -> str:
    parts = []
    for span in spans:
        if span["style"] == "bold":
            parts.append(f"**{span['text']}**")
        elif span["style"] == "em":
            parts.append(f"*{span['text']}*")
        else:
            parts.append(span["text"])
    return "".join(parts)


def _block_to_markdown(block: dict) -> str:
    if block["kind"] == PARAGRAPH:
        return _spans_to_markdown(block["spans"])
    if block["kind"] == UNORDERED_LIST:
        return "\n".join(f"- {_spans_to_markdown(item)}" for item in block["items"])
    if block["kind"] == ORDERED_LIST:
        return "\n".join(
            f"{i}. {_spans_to_markdown(item)}" for i, item in enumerate(block["items"], start=1)
        )
    raise ValueError(f"unknown block kind: {block['kind']!r}")


def render_markdown(report: dict, prompts: PromptSet) -> str:
    """Human-readable rendering of a report; same data, same order."""
    lines = [f"# Views: {report['source']}", ""]
    for paragraph in report["paragraphs"]:
        start = paragraph["range"]["start"]
        end = paragraph["range"]["end"]
        lines.append(f"## Paragraph {paragraph['index'] + 1} (chars {start}-{end})")
        lines.append("")
        for view in paragraph["views"]:
            label = view["prompt_id"]
            if view["prompt_id"] in prompts:
                label = prompts.get(view["prompt_id"]).label
            lines.append(f"### {label}")
            lines.append("")
            if view["status"] != "complete":
                lines.append(f"(error: {view['error_detail']})")
            else:
                for block in view["display_blocks"]:
                    lines.append(_block_to_markdown(block))
                    lines.append("")
                if view["display_blocks"]:
                    lines.pop()
            lines.append("")
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines) + "\n"
