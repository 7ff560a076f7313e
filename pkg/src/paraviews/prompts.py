"""Prompt catalog: builtin templates, user edits, and request rendering.

Builtins are fixed. Editing one forks it into a custom template so the
original stays available; customs can be exported and re-imported as JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .providers import (
    DEFAULT_CONTEXT_BUDGET,
    DEFAULT_MAX_OUTPUT_TOKENS,
    DEFAULT_TEMPERATURE,
    FILTER_FINAL_OUTPUT,
    FILTER_NONE,
    ProviderRequest,
    estimate_and_truncate,
)

CATEGORY_SUMMARY = "summary"
CATEGORY_INQUISITIVE = "inquisitive"
CATEGORY_ADVISORY = "advisory"
CATEGORY_CUSTOM = "custom"

CATEGORIES = (CATEGORY_SUMMARY, CATEGORY_INQUISITIVE, CATEGORY_ADVISORY, CATEGORY_CUSTOM)

# Fixed preamble for every request; the per-template body follows it.
INSTRUCTION_PREAMBLE = (
    "You are giving observations about the writer's paragraph; do not rewrite it."
)


class PromptNotFoundError(KeyError):
    pass


class PromptValidationError(ValueError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    label: str
    category: str
    body: str
    is_builtin: bool = False
    uses_final_output_filter: bool = False

    def __post_init__(self) -> None:
        if not self.id:
            raise PromptValidationError("prompt id must be non-empty")
        if not self.body.strip():
            raise PromptValidationError("prompt body must be non-empty")
        if self.category not in CATEGORIES:
            raise PromptValidationError(f"unknown category: {self.category!r}")


BUILTIN_PROMPTS = (
    PromptTemplate(
        id="thesis",
        label="Thesis Statement",
        category=CATEGORY_SUMMARY,
        body=(
            "Step 1: Write a sentence stating what seems to be the thesis of the "
            "paragraph. Step 2: Say FINAL OUTPUT. Step 3: Say the thesis again, but "
            "even more concisely with no filler words like `the thesis is.'"
        ),
        is_builtin=True,
        uses_final_output_filter=True,
    ),
    PromptTemplate(
        id="important-concepts",
        label="Important Concepts",
        category=CATEGORY_SUMMARY,
        body=(
            "Step 1: List 10 important concepts in this paragraph, in the format "
            "1. Concept: [concept as a complete sentence] Relevance: [relevance "
            "score, 10 best]. Step 2: Output FINAL OUTPUT, then a new line, then a "
            "Markdown unordered list with the 3 concepts with highest relevance, in "
            "short phrases of 2 or 3 words."
        ),
        is_builtin=True,
        uses_final_output_filter=True,
    ),
    PromptTemplate(
        id="writer-questions",
        label="Questions the Writer Was Attempting to Answer",
        category=CATEGORY_INQUISITIVE,
        body=(
            "List 2 or 3 questions that the writer was attempting to answer in "
            "this paragraph."
        ),
        is_builtin=True,
    ),
    PromptTemplate(
        id="reader-questions",
        label="Questions a Reader Might Have",
        category=CATEGORY_INQUISITIVE,
        body=(
            "As a reader, ask the writer 2 or 3 questions about definitions, "
            "logical connections, or some needed background information."
        ),
        is_builtin=True,
    ),
    PromptTemplate(
        id="advice",
        label="Advice",
        category=CATEGORY_ADVISORY,
        body=(
            "What advice would you give the writer to improve this paragraph? "
            "Respond in a bulleted list."
        ),
        is_builtin=True,
    ),
)

_CATEGORY_ORDER = {
    CATEGORY_SUMMARY: 0,
    CATEGORY_INQUISITIVE: 1,
    CATEGORY_ADVISORY: 2,
    CATEGORY_CUSTOM: 3,
}

DEFAULT_PROMPT_ID = BUILTIN_PROMPTS[0].id


class PromptSet:
    """Catalog of available templates: all builtins plus any customs.

    Listing order is stable: builtins grouped by category (summary,
    inquisitive, advisory), then customs in creation order.
    """

    def __init__(self, customs: tuple[PromptTemplate, ...] = ()):
        self._customs: list[PromptTemplate] = []
        self._by_id: dict[str, PromptTemplate] = {p.id: p for p in BUILTIN_PROMPTS}
        for template in customs:
            self._add_custom(template)

    def _add_custom(self, template: PromptTemplate) -> PromptTemplate:
        if template.id in self._by_id:
            raise PromptValidationError(f"duplicate prompt id: {template.id!r}")
        if template.is_builtin:
            raise PromptValidationError("cannot add a builtin template")
        self._customs.append(template)
        self._by_id[template.id] = template
        return template

    def get(self, prompt_id: str) -> PromptTemplate:
        try:
            return self._by_id[prompt_id]
        except KeyError:
            raise PromptNotFoundError(prompt_id) from None

    def __contains__(self, prompt_id: str) -> bool:
        return prompt_id in self._by_id

    def list(self) -> list[PromptTemplate]:
        builtins = sorted(
            BUILTIN_PROMPTS,
            key=lambda p: _CATEGORY_ORDER[p.category],
        )
        return list(builtins) + list(self._customs)

    def ids(self) -> list[str]:
        return [p.id for p in self.list()]

    def add(
        self,
        label: str,
        body: str,
        category: str = CATEGORY_CUSTOM,
        prompt_id: str | None = None,
    ) -> PromptTemplate:
        if prompt_id is None:
            prompt_id = self._fresh_id(_slug(label) or "custom")
        return self._add_custom(
            PromptTemplate(id=prompt_id, label=label, category=category, body=body)
        )

    def edit(self, prompt_id: str, body: str, label: str | None = None) -> PromptTemplate:
        """Replace a custom's body in place; editing a builtin forks it."""
        original = self.get(prompt_id)
        if not body.strip():
            raise PromptValidationError("prompt body must be non-empty")
        if original.is_builtin:
            fork = PromptTemplate(
                id=self._fresh_id(original.id),
                label=label if label is not None else f"{original.label} (edited)",
                category=CATEGORY_CUSTOM,
                body=body,
            )
            return self._add_custom(fork)
        updated = replace(
            original, body=body, label=label if label is not None else original.label
        )
        self._customs[self._customs.index(original)] = updated
        self._by_id[prompt_id] = updated
        return updated

    def _fresh_id(self, base: str) -> str:
        candidate = base
        n = 2
        while candidate in self._by_id:
            candidate = f"{base}-{n}"
            n += 1
        return candidate

    def export_customs(self) -> str:
        """Customs only, as a JSON array; builtins never travel."""
        entries = [
            {"id": p.id, "label": p.label, "category": p.category, "body": p.body}
            for p in self._customs
        ]
        return json.dumps(entries, indent=2, sort_keys=True)

    def import_customs(self, payload: str) -> list[PromptTemplate]:
        try:
            entries = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise PromptValidationError(f"invalid prompt JSON: {exc}") from exc
        if not isinstance(entries, list):
            raise PromptValidationError("prompt import must be a JSON array")
        imported = []
        for entry in entries:
            template = PromptTemplate(
                id=entry["id"],
                label=entry["label"],
                category=entry.get("category", CATEGORY_CUSTOM),
                body=entry["body"],
            )
            if template.is_builtin or template.id in self._by_id:
                raise PromptValidationError(f"duplicate prompt id: {template.id!r}")
            imported.append(template)
        for template in imported:
            self._add_custom(template)
        return imported


def _slug(label: str) -> str:
    keep = [c.lower() if c.isalnum() else "-" for c in label]
    slug = "".join(keep).strip("-")
    while "--" in slug:
        slug = slug.replace("--", "-")
    return slug


def render(
    template: PromptTemplate,
    paragraph_text: str,
    title: str | None = None,
    *,
    context_budget_chars: int = DEFAULT_CONTEXT_BUDGET,
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS,
    temperature: float = DEFAULT_TEMPERATURE,
) -> ProviderRequest:
    """Build the provider request for one template applied to one paragraph."""
    context = paragraph_text
    if title:
        context = f"Title: {title}\n\n{context}"
    context, truncated = estimate_and_truncate(context, context_budget_chars)
    return ProviderRequest(
        instruction=f"{INSTRUCTION_PREAMBLE}\n\n{template.body}",
        context=context,
        truncated=truncated,
        max_output_tokens=max_output_tokens,
        temperature=temperature,
        filter=FILTER_FINAL_OUTPUT if template.uses_final_output_filter else FILTER_NONE,
    )


def save_prompts(prompt_set: PromptSet, path: str | Path) -> None:
    Path(path).write_text(prompt_set.export_customs(), encoding="utf-8")


def load_prompts(path: str | Path) -> PromptSet:
    prompt_set = PromptSet()
    prompt_set.import_customs(Path(path).read_text(encoding="utf-8"))
    return prompt_set
