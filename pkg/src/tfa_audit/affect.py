"""Per-page emotion profiling and readability scoring.

Readability follows Flesch Reading Ease and the Automated Readability
Index, plus a composite accessibility score ("access-v1", defined here)
that penalises long sentences, long paragraphs, and high grade level.
Emotion scoring is delegated to a pluggable backend producing a
distribution over the seven emotion classes.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import requests

EMOTION_LABELS = ("anger", "disgust", "fear", "joy", "neutral", "sadness", "surprise")

ACCESSIBILITY_VERSION = "access-v1"

_WORD_RE = re.compile(r"(?:[^\W_]|')+", re.UNICODE)
_SENTENCE_SPLIT_RE = re.compile(r"[.!?]+(?:\s+|$)")
_PARAGRAPH_SPLIT_RE = re.compile(r"\n\s*\n")
_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")


class AffectError(Exception):
    """Emotion backend failure for one page."""


class EmotionContractError(AffectError):
    """Backend broke the seven-label contract; not retryable."""


@dataclass(frozen=True)
class TextCounts:
    words: int
    sentences: int
    syllables: int
    characters: int
    paragraphs: int

    @property
    def avg_sentence_words(self) -> float:
        return self.words / self.sentences if self.sentences else 0.0

    @property
    def avg_paragraph_words(self) -> float:
        return self.words / self.paragraphs if self.paragraphs else 0.0


@dataclass(frozen=True)
class ReadabilityScores:
    flesch: float
    ari: float
    accessibility: float
    avg_sentence_words: float
    avg_paragraph_words: float
    counts: TextCounts


@dataclass(frozen=True)
class EmotionProfile:
    scores: dict[str, float]
    dominant: str

    def as_dict(self) -> dict[str, float]:
        return dict(self.scores)


def _syllables_in_word(word: str) -> int:
    letters = re.sub(r"[^a-z]", "", word.lower())
    if not letters:
        return 1
    groups = len(_VOWEL_GROUP_RE.findall(letters))
    if letters.endswith("e"):
        trimmed = len(_VOWEL_GROUP_RE.findall(letters[:-1]))
        if trimmed > 0:
            groups = trimmed
    return max(groups, 1)


def text_counts(text: str, paragraph_spans: list[tuple[int, int]] | None = None) -> TextCounts:
    """Token counts feeding the readability formulas.

    Words are maximal alphanumeric-or-apostrophe runs; sentences split on
    ``. ! ?`` followed by whitespace or end of text (min 1 when any word
    exists); characters count alphanumerics only; syllables use a
    vowel-group heuristic with the silent trailing 'e' dropped unless that
    empties the word. Paragraphs come from ``paragraph_spans`` when given,
    otherwise from blank-line splits.
    """
    words = _WORD_RE.findall(text)
    word_count = len(words)
    characters = sum(1 for ch in text if ch.isalnum())
    syllables = sum(_syllables_in_word(w) for w in words)

    segments = _SENTENCE_SPLIT_RE.split(text)
    sentences = sum(1 for seg in segments if _WORD_RE.search(seg))
    if word_count >= 1:
        sentences = max(sentences, 1)

    if paragraph_spans is not None:
        paragraphs = sum(1 for s, e in paragraph_spans if _WORD_RE.search(text[s:e]))
    else:
        paragraphs = sum(
            1 for part in _PARAGRAPH_SPLIT_RE.split(text) if _WORD_RE.search(part)
        )
    if word_count >= 1:
        paragraphs = max(paragraphs, 1)

    return TextCounts(
        words=word_count,
        sentences=sentences,
        syllables=syllables,
        characters=characters,
        paragraphs=paragraphs,
    )


def flesch(counts: TextCounts) -> float:
    """Flesch Reading Ease; unbounded, negative for very dense text."""
    if counts.words < 1:
        raise ValueError("Flesch undefined for zero words")
    return (
        206.835
        - 1.015 * (counts.words / counts.sentences)
        - 84.6 * (counts.syllables / counts.words)
    )


def ari(counts: TextCounts) -> float:
    """Automated Readability Index; higher means more complex text."""
    if counts.words < 1:
        raise ValueError("ARI undefined for zero words")
    return (
        4.71 * (counts.characters / counts.words)
        + 0.5 * (counts.words / counts.sentences)
        - 21.43
    )


def accessibility(counts: TextCounts, ari_score: float) -> float:
    """Composite accessibility in [0, 100] (access-v1).

    Penalties: 2 points per word of average sentence length over 20,
    0.5 per word of average paragraph length over 80, 2.5 per ARI grade
    over 8; the result is clamped to [0, 100].
    """
    if counts.words < 1:
        raise ValueError("accessibility undefined for zero words")
    score = (
        100.0
        - 2.0 * max(0.0, counts.avg_sentence_words - 20.0)
        - 0.5 * max(0.0, counts.avg_paragraph_words - 80.0)
        - 2.5 * max(0.0, ari_score - 8.0)
    )
    return min(100.0, max(0.0, score))


def readability(text: str, paragraph_spans: list[tuple[int, int]] | None = None) -> ReadabilityScores:
    counts = text_counts(text, paragraph_spans)
    f = flesch(counts)
    a = ari(counts)
    return ReadabilityScores(
        flesch=f,
        ari=a,
        accessibility=accessibility(counts, a),
        avg_sentence_words=counts.avg_sentence_words,
        avg_paragraph_words=counts.avg_paragraph_words,
        counts=counts,
    )


def emotion_profile(text: str, backend: "EmotionBackend") -> EmotionProfile:
    """Score ``text`` with ``backend`` and pick the dominant emotion.

    The backend must return exactly the seven emotion labels with scores
    summing to 1 (±0.01); anything else is a contract violation. Ties on
    the maximum break to the lexicographically smallest label.
    """
    if not text:
        raise ValueError("emotion profile requires non-empty text")
    try:
        scores = backend.score_emotions(text)
    except EmotionContractError:
        raise
    except AffectError:
        raise
    except Exception as exc:
        raise AffectError(f"emotion backend failed: {exc}") from exc

    if set(scores) != set(EMOTION_LABELS):
        raise EmotionContractError(
            f"backend returned labels {sorted(scores)}, expected {sorted(EMOTION_LABELS)}"
        )
    total = sum(scores.values())
    if abs(total - 1.0) > 0.01:
        raise EmotionContractError(f"emotion scores sum to {total:.4f}, expected 1")
    ordered = {label: float(scores[label]) for label in EMOTION_LABELS}
    best = max(ordered.values())
    dominant = min(label for label, value in ordered.items() if value == best)
    return EmotionProfile(scores=ordered, dominant=dominant)


class EmotionBackend:
    """Interface: map text to a distribution over the seven emotion labels."""

    backend_id: str = "abstract"

    def score_emotions(self, text: str) -> dict[str, float]:
        raise NotImplementedError


class MockEmotionBackend(EmotionBackend):
    """Deterministic hash-driven distribution; no model involved.

    Each label's raw weight is derived from a SHA-256 of the text and the
    label, then the weights are normalised. Stable across runs and
    platforms, which is what golden-file pipeline tests need.
    """

    backend_id = "mock-emotion-v1"

    def score_emotions(self, text: str) -> dict[str, float]:
        digest_base = hashlib.sha256(text.encode("utf-8")).hexdigest()
        raw = {}
        for label in EMOTION_LABELS:
            h = hashlib.sha256(f"{digest_base}:{label}".encode("utf-8")).digest()
            raw[label] = 1 + int.from_bytes(h[:4], "big")
        total = sum(raw.values())
        return {label: raw[label] / total for label in EMOTION_LABELS}


class HttpEmotionBackend(EmotionBackend):
    """Client for the emotion endpoint of an inference sidecar."""

    def __init__(self, endpoint: str, timeout: float = 60.0, session: requests.Session | None = None):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.session = session or requests.Session()
        self.backend_id = f"http-emotion:{self.endpoint}"

    def score_emotions(self, text: str) -> dict[str, float]:
        url = f"{self.endpoint}/v1/emotion"
        try:
            response = self.session.post(url, json={"text": text}, timeout=self.timeout)
        except requests.RequestException as exc:
            raise AffectError(f"POST {url} failed: {exc}") from exc
        if response.status_code != 200:
            raise AffectError(f"POST {url} returned {response.status_code}")
        try:
            payload = response.json()
            scores = payload["scores"]
        except (ValueError, KeyError) as exc:
            raise AffectError(f"malformed emotion response from {url}") from exc
        model_id = payload.get("model_id")
        if model_id:
            self.backend_id = f"http-emotion:{model_id}"
        return {str(k): float(v) for k, v in scores.items()}


def affect_record(url: str, text: str, backend: EmotionBackend) -> dict:
    """One page's persisted affect row (emotions + readability)."""
    scores = readability(text)
    profile = emotion_profile(text, backend)
    return {
        "url": url,
        "emotions": profile.as_dict(),
        "dominant": profile.dominant,
        "flesch": scores.flesch,
        "ari": scores.ari,
        "accessibility": scores.accessibility,
        "counts": {
            "words": scores.counts.words,
            "sentences": scores.counts.sentences,
            "syllables": scores.counts.syllables,
            "characters": scores.counts.characters,
            "paragraphs": scores.counts.paragraphs,
            "avg_sentence_words": scores.avg_sentence_words,
            "avg_paragraph_words": scores.avg_paragraph_words,
        },
    }
