"""Taxonomy-driven auditing of institutional websites.

The package crawls seed domains, extracts and filters page text,
classifies pages against technology-facilitated-abuse taxonomies with
pluggable zero-shot backends, profiles emotion and readability, and
renders the aggregate tables.
"""

from .affect import (
    EMOTION_LABELS,
    EmotionProfile,
    HttpEmotionBackend,
    MockEmotionBackend,
    ReadabilityScores,
    accessibility,
    ari,
    emotion_profile,
    flesch,
    readability,
    text_counts,
)
from .classify import (
    ClassificationConfig,
    ClassifierBackend,
    HttpBackend,
    LabelAssignment,
    LexicalBackend,
    MockBackend,
    builtin_lexical_backend,
    classify_primary,
    classify_sub,
    http_backend,
)
from .config import ConfigError, PipelineConfig, load_config, validate_config
from .crawler import CrawlConfig, CrawlSummary, FetchRecord, Frontier, crawl, mime_filter
from .extract import CleanPage, apply_filters, clean_page, extract_text
from .language import LanguageVerdict, language_check
from .report import ReportBundle, compute_reports, render
from .store import RunManifest, RunStore, StoreError
from .taxonomy import (
    LabelPath,
    Taxonomy,
    TaxonomyError,
    TaxonomyNode,
    label_space,
    load_all_shipped,
    load_shipped,
    load_taxonomy,
    serialize_taxonomy,
)
from .urls import Scope, UrlError, in_scope, normalize_url, registrable_domain

__version__ = "0.1.0"

__all__ = [
    "EMOTION_LABELS",
    "EmotionProfile",
    "HttpEmotionBackend",
    "MockEmotionBackend",
    "ReadabilityScores",
    "accessibility",
    "ari",
    "emotion_profile",
    "flesch",
    "readability",
    "text_counts",
    "ClassificationConfig",
    "ClassifierBackend",
    "HttpBackend",
    "LabelAssignment",
    "LexicalBackend",
    "MockBackend",
    "builtin_lexical_backend",
    "classify_primary",
    "classify_sub",
    "http_backend",
    "ConfigError",
    "PipelineConfig",
    "load_config",
    "validate_config",
    "CrawlConfig",
    "CrawlSummary",
    "FetchRecord",
    "Frontier",
    "crawl",
    "mime_filter",
    "CleanPage",
    "apply_filters",
    "clean_page",
    "extract_text",
    "LanguageVerdict",
    "language_check",
    "ReportBundle",
    "compute_reports",
    "render",
    "RunManifest",
    "RunStore",
    "StoreError",
    "LabelPath",
    "Taxonomy",
    "TaxonomyError",
    "TaxonomyNode",
    "label_space",
    "load_all_shipped",
    "load_shipped",
    "load_taxonomy",
    "serialize_taxonomy",
    "Scope",
    "UrlError",
    "in_scope",
    "normalize_url",
    "registrable_domain",
]
