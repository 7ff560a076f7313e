"""Paragraph-scoped LLM views for revision support."""

from .document import (
    CursorScope,
    Document,
    DocumentDiff,
    EmptyDocumentError,
    Paragraph,
    Span,
    content_hash,
    diff_paragraphs,
    segment,
    snap,
)
from .engine import Neighborhood, View, ViewCache, ViewEngine
from .filtering import OUTPUT_MARKER, filter_final_output
from .markdown import Block, InlineSpan, blocks_to_wire, parse_display, parse_inline
from .prompts import (
    BUILTIN_PROMPTS,
    PromptNotFoundError,
    PromptSet,
    PromptTemplate,
    PromptValidationError,
    render,
)
from .providers import (
    MockProvider,
    OpenAIChatProvider,
    Provider,
    ProviderConfig,
    ProviderRequest,
    ScriptedResponse,
    StreamEvent,
    estimate_and_truncate,
    load_fixtures,
    save_fixtures,
)
from .service import ServiceConfig, create_app

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_PROMPTS",
    "Block",
    "CursorScope",
    "Document",
    "DocumentDiff",
    "EmptyDocumentError",
    "InlineSpan",
    "MockProvider",
    "Neighborhood",
    "OpenAIChatProvider",
    "OUTPUT_MARKER",
    "Paragraph",
    "Provider",
    "ProviderConfig",
    "ProviderRequest",
    "PromptNotFoundError",
    "PromptSet",
    "PromptTemplate",
    "PromptValidationError",
    "ScriptedResponse",
    "ServiceConfig",
    "Span",
    "StreamEvent",
    "View",
    "ViewCache",
    "ViewEngine",
    "blocks_to_wire",
    "content_hash",
    "create_app",
    "diff_paragraphs",
    "estimate_and_truncate",
    "filter_final_output",
    "load_fixtures",
    "parse_display",
    "parse_inline",
    "render",
    "save_fixtures",
    "segment",
    "snap",
    "__version__",
]
