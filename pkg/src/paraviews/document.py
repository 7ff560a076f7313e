"""Plain-text document model: paragraph segmentation, cursor snapping, diffing.

Paragraphs follow word-processor semantics: every newline terminates a
paragraph. Whitespace-only lines are treated as separators. Offsets are
Unicode code-point indices into the document string.
"""

from __future__ import annotations

import hashlib
from bisect import bisect_right
from dataclasses import dataclass, field

NEIGHBORHOOD_SPAN = 1  # paragraphs on each side of the cursor


class EmptyDocumentError(ValueError):
    """Raised when an operation needs at least one paragraph."""


@dataclass(frozen=True)
class Span:
    """Half-open character interval [start, end) into the document text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def distance(self, offset: int) -> int:
        """Distance from a cursor offset to this span's boundary.

        Offsets inside the span, and the offset just past its last character
        (the position a cursor takes at end of paragraph), are at distance 0.
        """
        return max(0, self.start - offset, offset - self.end)


def content_hash(text: str) -> str:
    """Digest of paragraph text normalized by trimming edge whitespace."""
    return hashlib.sha256(text.strip().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Paragraph:
    index: int
    span: Span
    text: str
    content_hash: str


@dataclass(frozen=True)
class CursorScope:
    """The snapped paragraph and its preceding/succeeding neighbors."""

    paragraph_index: int
    neighborhood: tuple[int, ...]


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    version: int = 1
    paragraphs: tuple[Paragraph, ...] = field(default=())

    @classmethod
    def from_text(cls, doc_id: str, text: str, version: int = 1) -> Document:
        return cls(id=doc_id, text=text, version=version, paragraphs=tuple(segment(text)))

    def paragraph_at(self, index: int) -> Paragraph | None:
        if 0 <= index < len(self.paragraphs):
            return self.paragraphs[index]
        return None


def segment(text: str) -> list[Paragraph]:
    """Split text into paragraphs on every newline, dropping blank segments.

    Returned spans index into the original text; paragraph text is the exact
    substring of its span (edge whitespace preserved, newlines excluded).
    """
    paragraphs: list[Paragraph] = []
    pos = 0
    for raw in text.split("\n"):
        end = pos + len(raw)
        if raw.strip():
            paragraphs.append(
                Paragraph(
                    index=len(paragraphs),
                    span=Span(pos, end),
                    text=raw,
                    content_hash=content_hash(raw),
                )
            )
        pos = end + 1  # skip the newline
    return paragraphs


def snap(doc: Document, offset: int) -> CursorScope:
    """Map a cursor offset to the nearest paragraph and its neighborhood.

    Offsets inside a paragraph (including the position just after its last
    character) resolve to it; offsets in separator runs resolve to the
    closest paragraph by boundary distance, preferring the preceding one
    on ties.
    """
    if not 0 <= offset <= len(doc.text):
        raise ValueError(f"offset {offset} outside document of length {len(doc.text)}")
    if not doc.paragraphs:
        raise EmptyDocumentError("document has no paragraphs")

    starts = [p.span.start for p in doc.paragraphs]
    pos = bisect_right(starts, offset)
    # Only the paragraph starting at or before the offset and the next one
    # can be nearest; compare the two, preferring the earlier on a tie.
    best = doc.paragraphs[pos - 1] if pos > 0 else doc.paragraphs[0]
    if pos < len(doc.paragraphs):
        nxt = doc.paragraphs[pos]
        if nxt.span.distance(offset) < best.span.distance(offset):
            best = nxt

    index = best.index
    lo = max(0, index - NEIGHBORHOOD_SPAN)
    hi = min(len(doc.paragraphs), index + NEIGHBORHOOD_SPAN + 1)
    return CursorScope(paragraph_index=index, neighborhood=tuple(range(lo, hi)))


@dataclass(frozen=True)
class DocumentDiff:
    """Paragraph-level difference between two document versions.

    ``changed`` and ``inserted`` hold new-document indices, ``deleted`` holds
    old-document indices. ``stale_hashes`` are content hashes present in the
    old document but absent from the new one; they key cache invalidation.
    """

    changed: frozenset[int]
    inserted: frozenset[int]
    deleted: frozenset[int]
    stale_hashes: frozenset[str]

    @property
    def is_empty(self) -> bool:
        return not (self.changed or self.inserted or self.deleted)


def _align(old: list[str], new: list[str]) -> list[tuple[int, int]]:
    """Maximum monotone matching of equal items (longest common subsequence)."""
    # Trim the common prefix/suffix first; edits are usually local.
    n, m = len(old), len(new)
    lo = 0
    while lo < n and lo < m and old[lo] == new[lo]:
        lo += 1
    hi = 0
    while hi < n - lo and hi < m - lo and old[n - 1 - hi] == new[m - 1 - hi]:
        hi += 1

    pairs = [(i, i) for i in range(lo)]
    mid_old = old[lo : n - hi]
    mid_new = new[lo : m - hi]
    if mid_old and mid_new and len(mid_old) * len(mid_new) <= 1_000_000:
        # Classic LCS table over the (small) unmatched middle.
        rows, cols = len(mid_old), len(mid_new)
        table = [[0] * (cols + 1) for _ in range(rows + 1)]
        for i in range(rows - 1, -1, -1):
            for j in range(cols - 1, -1, -1):
                if mid_old[i] == mid_new[j]:
                    table[i][j] = table[i + 1][j + 1] + 1
                else:
                    table[i][j] = max(table[i + 1][j], table[i][j + 1])
        i = j = 0
        while i < rows and j < cols:
            if mid_old[i] == mid_new[j]:
                pairs.append((lo + i, lo + j))
                i += 1
                j += 1
            elif table[i + 1][j] >= table[i][j + 1]:
                i += 1
            else:
                j += 1
    pairs.extend((n - hi + k, m - hi + k) for k in range(hi))
    return pairs


def diff_paragraphs(old: Document, new: Document) -> DocumentDiff:
    """Classify paragraphs as changed, inserted, or deleted between versions.

    Paragraphs are aligned by content hash; within each unmatched gap,
    positionally paired paragraphs count as changed and the surplus as
    insertions or deletions.
    """
    old_hashes = [p.content_hash for p in old.paragraphs]
    new_hashes = [p.content_hash for p in new.paragraphs]
    matched = _align(old_hashes, new_hashes)

    changed: set[int] = set()
    inserted: set[int] = set()
    deleted: set[int] = set()
    prev_i = prev_j = 0
    for i, j in matched + [(len(old_hashes), len(new_hashes))]:
        gap_old = range(prev_i, i)
        gap_new = range(prev_j, j)
        paired = min(len(gap_old), len(gap_new))
        changed.update(gap_new[:paired])
        inserted.update(gap_new[paired:])
        deleted.update(gap_old[paired:])
        prev_i, prev_j = i + 1, j + 1

    stale = frozenset(set(old_hashes) - set(new_hashes))
    return DocumentDiff(
        changed=frozenset(changed),
        inserted=frozenset(inserted),
        deleted=frozenset(deleted),
        stale_hashes=stale,
    )
