"""HTML-to-text conversion and the page filter chain.

Boilerplate removal is landmark-based: script/style/noscript/template
content and nav/header/footer/aside regions are dropped wholesale, block
element boundaries become paragraph breaks, and whitespace is collapsed.
The filter chain mirrors the corpus preprocessing order: empty page,
length floor, language check, duplicate text.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, replace
from html.parser import HTMLParser

from .language import LanguageVerdict, language_check

SKIP_ELEMENTS = frozenset(
    ["script", "style", "noscript", "template", "nav", "header", "footer", "aside", "head", "svg"]
)

BLOCK_ELEMENTS = frozenset(
    [
        "address", "article", "blockquote", "br", "caption", "dd", "details", "div",
        "dl", "dt", "fieldset", "figcaption", "figure", "form", "h1", "h2", "h3",
        "h4", "h5", "h6", "hr", "li", "main", "ol", "option", "p", "pre", "section",
        "select", "summary", "table", "tbody", "td", "tfoot", "th", "thead", "tr", "ul",
    ]
)

DROP_REASONS = ("empty", "too_short", "non_english", "duplicate")

_WORD_RE = re.compile(r"(?:[^\W_]|')+", re.UNICODE)
_BLANK_LINE_RE = re.compile(r"\n\s*\n")
_CHARSET_RE = re.compile(rb"""charset\s*=\s*["']?\s*([A-Za-z0-9_.:-]+)""", re.IGNORECASE)
_TAG_STRIP_RE = re.compile(r"<[^>]*>")


@dataclass(frozen=True)
class ExtractionResult:
    text: str
    paragraph_spans: tuple[tuple[int, int], ...]
    used_fallback: bool = False


@dataclass(frozen=True)
class CleanPage:
    url: str
    text: str
    word_count: int
    paragraph_spans: tuple[tuple[int, int], ...]
    language: LanguageVerdict
    dedup_key: str
    verdict: str = "pending"  # pending | kept | dropped
    drop_reason: str | None = None
    used_fallback: bool = False

    @property
    def kept(self) -> bool:
        return self.verdict == "kept"


class _TextCollector(HTMLParser):
    """Streams visible text into paragraphs, honoring skip regions."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.paragraphs: list[str] = []
        self._chunks: list[str] = []
        self._skip_stack: list[str] = []

    def _flush(self) -> None:
        paragraph = " ".join("".join(self._chunks).split())
        self._chunks = []
        if paragraph:
            self.paragraphs.append(paragraph)

    def handle_starttag(self, tag, attrs):
        if tag in SKIP_ELEMENTS:
            self._skip_stack.append(tag)
            return
        if tag in BLOCK_ELEMENTS:
            self._flush()

    def handle_endtag(self, tag):
        if tag in SKIP_ELEMENTS:
            # Tolerate misnesting: pop the most recent matching open region.
            if tag in self._skip_stack:
                for i in range(len(self._skip_stack) - 1, -1, -1):
                    if self._skip_stack[i] == tag:
                        del self._skip_stack[i]
                        break
            return
        if tag in BLOCK_ELEMENTS:
            self._flush()

    def handle_startendtag(self, tag, attrs):
        if tag in BLOCK_ELEMENTS:
            self._flush()

    def handle_data(self, data):
        if self._skip_stack:
            return
        pieces = _BLANK_LINE_RE.split(data)
        for i, piece in enumerate(pieces):
            if i > 0:
                self._flush()
            if piece:
                self._chunks.append(piece)

    def close(self):
        super().close()
        self._flush()


def decode_html(raw: bytes) -> str:
    """Decode page bytes: UTF-8, else the declared charset, else lossy UTF-8."""
    if raw.startswith(b"\xef\xbb\xbf"):
        raw = raw[3:]
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        pass
    match = _CHARSET_RE.search(raw[:2048])
    if match:
        try:
            return raw.decode(match.group(1).decode("ascii"), errors="strict")
        except (UnicodeDecodeError, LookupError):
            pass
    return raw.decode("utf-8", errors="replace")


def _assemble(paragraphs: list[str]) -> tuple[str, tuple[tuple[int, int], ...]]:
    text = "\n\n".join(paragraphs)
    spans: list[tuple[int, int]] = []
    pos = 0
    for i, paragraph in enumerate(paragraphs):
        end = pos + len(paragraph)
        if i < len(paragraphs) - 1:
            end += 2  # the span owns its trailing separator so spans tile
        spans.append((pos, end))
        pos = end
    return text, tuple(spans)


def extract_text(html: bytes | str) -> ExtractionResult:
    """Visible text and paragraph spans from an HTML document.

    Falls back to bare tag stripping (flagged in the result) when the
    parser chokes on the markup.
    """
    decoded = decode_html(html) if isinstance(html, bytes) else html
    collector = _TextCollector()
    try:
        collector.feed(decoded)
        collector.close()
        paragraphs = collector.paragraphs
        used_fallback = False
    except Exception:
        stripped = _TAG_STRIP_RE.sub(" ", decoded)
        paragraphs = [
            " ".join(part.split())
            for part in _BLANK_LINE_RE.split(stripped)
            if part.strip()
        ]
        used_fallback = True
    text, spans = _assemble(paragraphs)
    return ExtractionResult(text=text, paragraph_spans=spans, used_fallback=used_fallback)


def word_count(text: str) -> int:
    return len(_WORD_RE.findall(text))


def dedup_key(text: str) -> str:
    """Content hash for duplicate detection: case- and whitespace-insensitive."""
    normalized = " ".join(text.lower().split())
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


def clean_page(url: str, html: bytes | str) -> CleanPage:
    """Extract and annotate one page; verdict stays pending until filtered."""
    extraction = extract_text(html)
    text = extraction.text
    verdict = language_check(text) if text else LanguageVerdict("other", "und")
    return CleanPage(
        url=url,
        text=text,
        word_count=word_count(text),
        paragraph_spans=extraction.paragraph_spans,
        language=verdict,
        dedup_key=dedup_key(text),
        used_fallback=extraction.used_fallback,
    )


def apply_filters(page: CleanPage, min_words: int, seen_keys: set[str] | None = None) -> CleanPage:
    """Assign the keep/drop verdict; the first failing filter names the reason.

    ``seen_keys`` carries corpus-wide dedup state: a kept page's key is
    added, a page whose key is already present drops as a duplicate.
    """
    if page.word_count == 0:
        return replace(page, verdict="dropped", drop_reason="empty")
    if page.word_count < min_words:
        return replace(page, verdict="dropped", drop_reason="too_short")
    if page.language.kind != "english":
        return replace(page, verdict="dropped", drop_reason="non_english")
    if seen_keys is not None:
        if page.dedup_key in seen_keys:
            return replace(page, verdict="dropped", drop_reason="duplicate")
        seen_keys.add(page.dedup_key)
    return replace(page, verdict="kept", drop_reason=None)
