"""Strip model self-talk from view output.

Some view prompts walk the model through intermediate steps and have it
announce the marker before the answer; only text after the last marker is
shown to the writer.
"""

from __future__ import annotations

import unicodedata

OUTPUT_MARKER = "FINAL OUTPUT"


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def filter_final_output(raw: str, filter_enabled: bool = True) -> str:
    """Return the display text for raw model output.

    When enabled and the case-sensitive marker occurs, the result is the text
    strictly after its last occurrence, with leading whitespace and
    punctuation removed. Otherwise the raw text is returned unchanged.
    """
    if not filter_enabled:
        return raw
    pos = raw.rfind(OUTPUT_MARKER)
    if pos < 0:
        return raw
    tail = raw[pos + len(OUTPUT_MARKER):]
    start = 0
    while start < len(tail) and (tail[start].isspace() or _is_punctuation(tail[start])):
        start += 1
    return tail[start:]
