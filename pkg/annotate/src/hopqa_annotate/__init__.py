"""Offline annotation exporter for the hopqa engine's ingestion formats."""

__version__ = "0.1.0"

from .backends import (
    BUILTIN,
    DEFAULT_EMBED_MODEL,
    DEFAULT_NER_MODEL,
    DEFAULT_PARSER_MODEL,
    build_embedder,
    build_ner,
    build_parser,
)
from .errors import AnnotateError
from .exporter import (
    AnnotationJob,
    JobSummary,
    annotate_corpus,
    annotate_questions,
    normalize_entity,
)

__all__ = [
    "BUILTIN",
    "DEFAULT_EMBED_MODEL",
    "DEFAULT_NER_MODEL",
    "DEFAULT_PARSER_MODEL",
    "AnnotateError",
    "AnnotationJob",
    "JobSummary",
    "annotate_corpus",
    "annotate_questions",
    "build_embedder",
    "build_ner",
    "build_parser",
    "normalize_entity",
]
