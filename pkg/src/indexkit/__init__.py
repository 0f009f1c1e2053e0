"""Draft back-of-the-book indexes from paginated documents.

Pipeline: ingest -> term extraction -> relation extraction -> reference
calculus -> ranking -> draft index; then human validation through the
bundled HTTP service, and evaluation of candidate indexes against
reference ones.
"""

from .config import PipelineConfig
from .corpus import Document, IngestOptions, TagLexicon, ingest_plain_text, ingest_tagged
from .index import DraftIndex, Decision, apply_validation_decisions, render_text
from .interchange import export_interchange, import_interchange
from .pipeline import build_draft

__version__ = "0.1.0"

__all__ = [
    "Decision",
    "Document",
    "DraftIndex",
    "IngestOptions",
    "PipelineConfig",
    "TagLexicon",
    "apply_validation_decisions",
    "build_draft",
    "export_interchange",
    "import_interchange",
    "ingest_plain_text",
    "ingest_tagged",
    "render_text",
]
