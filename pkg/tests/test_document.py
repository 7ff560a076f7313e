import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraviews.document import (
    Document,
    EmptyDocumentError,
    Span,
    content_hash,
    diff_paragraphs,
    segment,
    snap,
)

# --- independent oracles -------------------------------------------------


def snap_oracle(doc: Document, offset: int) -> int:
    """Nearest paragraph by boundary distance; earliest wins ties."""
    best_index = None
    best_distance = None
    for p in doc.paragraphs:
        d = max(0, p.span.start - offset, offset - p.span.end)
        if best_distance is None or d < best_distance:
            best_index = p.index
            best_distance = d
    return best_index


def random_text(rng: random.Random, max_paragraphs: int = 20, max_chars: int = 2000) -> str:
    pieces = []
    for _ in range(rng.randint(0, max_paragraphs)):
        kind = rng.random()
        if kind < 0.15:
            pieces.append(rng.choice(["", " ", "\t", "   "]))  # separator line
        else:
            length = rng.randint(1, 60)
            word = rng.choice(["alpha", "beta", "käse", "文字", "x y", "end."])
            pieces.append((word * (length // len(word) + 1))[:length])
    text = "\n".join(pieces)
    return text[:max_chars]


# --- segmentation ---------------------------------------------------------


def test_segment_two_paragraphs_blank_line():
    paragraphs = segment("A.\n\nB.")
    assert [p.text for p in paragraphs] == ["A.", "B."]
    assert paragraphs[0].span == Span(0, 2)
    assert paragraphs[1].span == Span(4, 6)


def test_segment_single_newline_also_splits():
    paragraphs = segment("one\ntwo")
    assert [p.text for p in paragraphs] == ["one", "two"]
    assert [(p.span.start, p.span.end) for p in paragraphs] == [(0, 3), (4, 7)]


def test_segment_whitespace_only_lines_are_separators():
    paragraphs = segment("a\n   \nb\n\t\nc")
    assert [p.text for p in paragraphs] == ["a", "b", "c"]


def test_segment_empty_and_blank_documents():
    assert segment("") == []
    assert segment("\n\n\n") == []
    assert segment("   \n \t ") == []


def test_segment_preserves_edge_whitespace_within_line():
    paragraphs = segment("  padded  \nplain")
    assert paragraphs[0].text == "  padded  "
    assert paragraphs[0].span == Span(0, 10)


def test_segment_trailing_newline():
    paragraphs = segment("tail\n")
    assert [p.text for p in paragraphs] == ["tail"]
    assert paragraphs[0].span == Span(0, 4)


def test_segment_text_matches_span_substring():
    text = "first one\n\n  second  \nthird\n"
    for p in segment(text):
        assert text[p.span.start : p.span.end] == p.text
        assert p.text.strip()


def test_content_hash_ignores_edge_whitespace_only():
    assert content_hash("  a  ") == content_hash("a")
    assert content_hash("a") != content_hash("b")
    assert len(content_hash("x")) == 64


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=400))
@settings(max_examples=200, deadline=None)
def test_segment_properties(text):
    paragraphs = segment(text)
    previous_end = -1
    for i, p in enumerate(paragraphs):
        assert p.index == i
        assert p.span.start > previous_end
        assert text[p.span.start : p.span.end] == p.text
        assert "\n" not in p.text
        assert p.text.strip()
        previous_end = p.span.end
    # characters outside all spans are newlines or sit on blank lines
    covered = set()
    for p in paragraphs:
        covered.update(range(p.span.start, p.span.end))
    line_start = 0
    for line in text.split("\n"):
        for i in range(line_start, line_start + len(line)):
            if line.strip():
                assert i in covered
            else:
                assert i not in covered
        line_start += len(line) + 1


@given(st.lists(st.text(alphabet="ab c.", min_size=1, max_size=20), max_size=10))
@settings(max_examples=200, deadline=None)
def test_segment_join_round_trip(lines):
    lines = [l for l in lines if l.strip()]
    text = "\n".join(lines)
    paragraphs = segment(text)
    assert [p.text for p in paragraphs] == lines
    rejoined = "\n".join(p.text for p in paragraphs)
    assert [p.text for p in segment(rejoined)] == lines


# --- snapping ------------------------------------------------------------


def test_snap_inside_paragraph():
    doc = Document.from_text("d", "A.\n\nB.")
    assert snap(doc, 0).paragraph_index == 0
    assert snap(doc, 1).paragraph_index == 0
    assert snap(doc, 5).paragraph_index == 1


def test_snap_separator_tie_prefers_preceding():
    doc = Document.from_text("d", "A.\n\nB.")
    # offset 3 is one past A's end and one before B's start: a tie
    assert snap(doc, 3).paragraph_index == 0
    assert snap(doc, 2).paragraph_index == 0
    assert snap(doc, 4).paragraph_index == 1


def test_snap_matches_oracle_on_crafted_doc():
    doc = Document.from_text("d", "aaa\n\n\nbbbb\n \ncc\n")
    for offset in range(len(doc.text) + 1):
        assert snap(doc, offset).paragraph_index == snap_oracle(doc, offset), offset


def test_snap_offset_validation():
    doc = Document.from_text("d", "hello")
    with pytest.raises(ValueError):
        snap(doc, -1)
    with pytest.raises(ValueError):
        snap(doc, 6)
    snap(doc, 5)  # end of document is a valid cursor position


def test_snap_empty_document_raises():
    doc = Document.from_text("d", "\n\n")
    with pytest.raises(EmptyDocumentError):
        snap(doc, 1)


def test_snap_neighborhood_edges():
    doc = Document.from_text("d", "a\nb\nc\nd")
    assert snap(doc, 0).neighborhood == (0, 1)
    assert snap(doc, 2).neighborhood == (0, 1, 2)
    assert snap(doc, 4).neighborhood == (1, 2, 3)
    assert snap(doc, 7).neighborhood == (2, 3)


def test_snap_single_paragraph_neighborhood():
    doc = Document.from_text("d", "only")
    assert snap(doc, 2).neighborhood == (0,)


def test_snap_randomized_exhaustive_sweep_matches_oracle():
    rng = random.Random(1234)
    for _ in range(60):
        text = random_text(rng, max_paragraphs=8, max_chars=300)
        doc = Document.from_text("d", text)
        if not doc.paragraphs:
            continue
        for offset in range(len(text) + 1):
            scope = snap(doc, offset)
            assert scope.paragraph_index == snap_oracle(doc, offset)
            assert scope.paragraph_index in scope.neighborhood


# --- diffing --------------------------------------------------------------


def _doc(*lines: str, version: int = 1) -> Document:
    return Document.from_text("d", "\n".join(lines), version=version)


def test_diff_identity_is_empty():
    a = _doc("one", "two")
    diff = diff_paragraphs(a, _doc("one", "two", version=2))
    assert diff.is_empty
    assert diff.stale_hashes == frozenset()


def test_diff_single_edit():
    diff = diff_paragraphs(_doc("one", "two", "three"), _doc("one", "TWO", "three"))
    assert diff.changed == frozenset({1})
    assert diff.inserted == frozenset()
    assert diff.deleted == frozenset()
    assert diff.stale_hashes == frozenset({content_hash("two")})


def test_diff_insertion():
    diff = diff_paragraphs(_doc("one", "three"), _doc("one", "two", "three"))
    assert diff.inserted == frozenset({1})
    assert diff.changed == frozenset()
    assert diff.deleted == frozenset()
    assert diff.stale_hashes == frozenset()


def test_diff_deletion():
    diff = diff_paragraphs(_doc("one", "two", "three"), _doc("one", "three"))
    assert diff.deleted == frozenset({1})
    assert diff.changed == frozenset()
    assert diff.stale_hashes == frozenset({content_hash("two")})


def test_diff_edit_plus_insert():
    diff = diff_paragraphs(_doc("a", "b"), _doc("a", "B", "c"))
    assert diff.changed == frozenset({1})
    assert diff.inserted == frozenset({2})
    assert diff.stale_hashes == frozenset({content_hash("b")})


def test_diff_duplicate_paragraph_kept_safe():
    # both copies survive, so nothing is stale even though one was deleted
    diff = diff_paragraphs(_doc("same", "same"), _doc("same"))
    assert diff.deleted == frozenset({1})
    assert diff.stale_hashes == frozenset()


def test_diff_total_rewrite():
    diff = diff_paragraphs(_doc("a", "b"), _doc("x", "y", "z"))
    assert diff.changed == frozenset({0, 1})
    assert diff.inserted == frozenset({2})
    assert diff.stale_hashes == frozenset({content_hash("a"), content_hash("b")})


@given(
    st.lists(st.sampled_from(["aa", "bb", "cc", "dd"]), max_size=6),
    st.lists(st.sampled_from(["aa", "bb", "cc", "dd"]), max_size=6),
)
@settings(max_examples=200, deadline=None)
def test_diff_invariants(old_lines, new_lines):
    old = Document.from_text("d", "\n".join(old_lines))
    new = Document.from_text("d", "\n".join(new_lines), version=2)
    diff = diff_paragraphs(old, new)
    new_count = len(new.paragraphs)
    old_count = len(old.paragraphs)
    assert diff.changed.isdisjoint(diff.inserted)
    assert all(0 <= i < new_count for i in diff.changed | diff.inserted)
    assert all(0 <= i < old_count for i in diff.deleted)
    old_hashes = {p.content_hash for p in old.paragraphs}
    new_hashes = {p.content_hash for p in new.paragraphs}
    assert diff.stale_hashes == frozenset(old_hashes - new_hashes)
    if [p.text for p in old.paragraphs] == [p.text for p in new.paragraphs]:
        assert diff.is_empty
