"""Line-based Markdown subset for structuring view text.

Recognizes ``- ``/``* `` unordered items, ``1. `` ordered items, ``**bold**``
and ``*em*`` spans. Anything else is plain paragraph text. Unlike full
Markdown there is no lazy continuation: a non-item line always ends a list.
Parsing is total; malformed markup falls back to literal text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_ORDERED_ITEM = re.compile(r"^(\d+)\. (.*)$")

PARAGRAPH = "paragraph"
UNORDERED_LIST = "unordered_list"
ORDERED_LIST = "ordered_list"


@dataclass(frozen=True)
class InlineSpan:
    text: str
    style: str = "plain"  # plain | bold | em


@dataclass(frozen=True)
class Block:
    kind: str
    spans: tuple[InlineSpan, ...] = ()
    items: tuple[tuple[InlineSpan, ...], ...] = ()


def parse_inline(text: str) -> tuple[InlineSpan, ...]:
    """Split text into styled spans; unmatched or empty markers stay literal."""
    spans: list[InlineSpan] = []
    plain: list[str] = []

    def flush() -> None:
        if plain:
            spans.append(InlineSpan("".join(plain)))
            plain.clear()

    i = 0
    while i < len(text):
        if text.startswith("**", i):
            close = text.find("**", i + 2)
            if close > i + 2:
                flush()
                spans.append(InlineSpan(text[i + 2 : close], "bold"))
                i = close + 2
                continue
        elif text[i] == "*":
            close = text.find("*", i + 1)
            if close > i + 1:
                flush()
                spans.append(InlineSpan(text[i + 1 : close], "em"))
                i = close + 1
                continue
        plain.append(text[i])
        i += 1
    flush()
    return tuple(spans)


def parse_display(display: str) -> list[Block]:
    """Parse display text into a flat list of blocks. Never raises."""
    blocks: list[Block] = []
    para_lines: list[str] = []
    items: list[tuple[InlineSpan, ...]] = []
    list_kind: str | None = None

    def flush_paragraph() -> None:
        if para_lines:
            blocks.append(Block(PARAGRAPH, spans=parse_inline(" ".join(para_lines))))
            para_lines.clear()

    def flush_list() -> None:
        nonlocal list_kind
        if items:
            blocks.append(Block(list_kind or UNORDERED_LIST, items=tuple(items)))
            items.clear()
        list_kind = None

    for raw_line in display.split("\n"):
        line = raw_line.strip()
        if not line:
            flush_paragraph()
            flush_list()
            continue
        ordered = _ORDERED_ITEM.match(line)
        if line.startswith("- ") or line.startswith("* "):
            flush_paragraph()
            if list_kind != UNORDERED_LIST:
                flush_list()
                list_kind = UNORDERED_LIST
            items.append(parse_inline(line[2:].strip()))
        elif ordered:
            flush_paragraph()
            if list_kind != ORDERED_LIST:
                flush_list()
                list_kind = ORDERED_LIST
            items.append(parse_inline(ordered.group(2).strip()))
        else:
            flush_list()
            para_lines.append(line)
    flush_paragraph()
    flush_list()
    return blocks


def blocks_to_wire(blocks: list[Block]) -> list[dict]:
    """JSON-ready projection of parsed blocks."""
    out: list[dict] = []
    for block in blocks:
        if block.kind == PARAGRAPH:
            out.append(
                {
                    "kind": block.kind,
                    "spans": [{"text": s.text, "style": s.style} for s in block.spans],
                }
            )
        else:
            out.append(
                {
                    "kind": block.kind,
                    "items": [
                        [{"text": s.text, "style": s.style} for s in item]
                        for item in block.items
                    ],
                }
            )
    return out
