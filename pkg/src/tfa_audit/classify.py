"""Hierarchical zero-shot multi-label classification against a taxonomy.

Primary categories are scored for every page; a primary's subcategories
are scored only for pages in that primary's group, and only when the
group holds at least ``min_group`` pages. Scoring itself lives behind the
:class:`ClassifierBackend` interface so a mock, a lexical overlap scorer,
or an HTTP inference sidecar can slot in interchangeably.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .taxonomy import Taxonomy, label_space

log = logging.getLogger(__name__)

_WORD_RE = re.compile(r"(?:[^\W_]|')+", re.UNICODE)

STATUS_LABELED = "labeled"
STATUS_UNLABELED = "unlabeled"
STATUS_FAILED = "classification_failed"


class BackendError(Exception):
    """Scoring backend unavailable or returned garbage."""


@dataclass(frozen=True)
class ClassificationConfig:
    threshold: float = 0.5
    min_group: int = 15
    batch_size: int = 16
    max_retries: int = 3
    retry_base_delay: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0,1], got {self.threshold}")
        if self.min_group < 1:
            raise ValueError(f"min_group must be >= 1, got {self.min_group}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_retries < 1:
            raise ValueError(f"max_retries must be >= 1, got {self.max_retries}")
        if self.retry_base_delay < 0:
            raise ValueError(f"retry_base_delay must be >= 0, got {self.retry_base_delay}")


@dataclass
class LabelAssignment:
    url: str
    taxonomy: str
    primaries: list[tuple[str, float]] = field(default_factory=list)
    subs: list[tuple[str, str, float]] = field(default_factory=list)  # (primary, sub, score)
    status: str = STATUS_UNLABELED

    def primary_ids(self) -> list[str]:
        return [pid for pid, _ in self.primaries]

    def to_record(self, backend_id: str, cfg: ClassificationConfig) -> dict:
        return {
            "url": self.url,
            "taxonomy": self.taxonomy,
            "status": self.status,
            "primaries": [{"id": pid, "score": score} for pid, score in self.primaries],
            "subs": [
                {"primary": pid, "sub": sid, "score": score}
                for pid, sid, score in self.subs
            ],
            "backend_id": backend_id,
            "config": {"threshold": cfg.threshold, "min_group": cfg.min_group},
        }

    @classmethod
    def from_record(cls, record: dict) -> "LabelAssignment":
        return cls(
            url=record["url"],
            taxonomy=record["taxonomy"],
            primaries=[(p["id"], float(p["score"])) for p in record.get("primaries", [])],
            subs=[
                (s["primary"], s["sub"], float(s["score"]))
                for s in record.get("subs", [])
            ],
            status=record.get("status", STATUS_UNLABELED),
        )


class ClassifierBackend:
    """Interface: score a text against candidate labels, each in [0,1].

    Scores are independent per label (multi-label; no cross-label
    normalization), and every requested id gets exactly one score.
    """

    backend_id: str = "abstract"

    def score_labels(self, text: str, candidates: list[tuple[str, str]]) -> dict[str, float]:
        raise NotImplementedError


class MockBackend(ClassifierBackend):
    """Deterministic hash-driven scores for tests and golden runs."""

    backend_id = "mock-zeroshot-v1"

    def score_labels(self, text: str, candidates: list[tuple[str, str]]) -> dict[str, float]:
        text_digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        scores = {}
        for label_id, _hypothesis in candidates:
            h = hashlib.sha256(f"{text_digest}:{label_id}".encode("utf-8")).digest()
            scores[label_id] = int.from_bytes(h[:4], "big") / 0xFFFFFFFF
        return scores


class LexicalBackend(ClassifierBackend):
    """Offline scorer: normalized term overlap between page and label lexicon.

    score(label) = |lexicon terms present in the page| / |lexicon terms|.
    A term is present when its word sequence occurs contiguously in the
    tokenized page text. Labels missing from the lexicon score 0 (warned
    once per label).
    """

    backend_id = "lexical-overlap-v1"

    def __init__(self, lexicon: dict[str, list[str]]):
        self.lexicon = {label: [self._tokens(t) for t in terms] for label, terms in lexicon.items()}
        self._warned: set[str] = set()

    @staticmethod
    def _tokens(text: str) -> tuple[str, ...]:
        return tuple(w.lower() for w in _WORD_RE.findall(text))

    @staticmethod
    def _contains(haystack: tuple[str, ...], needle: tuple[str, ...]) -> bool:
        if not needle or len(needle) > len(haystack):
            return False
        first = needle[0]
        for i in range(len(haystack) - len(needle) + 1):
            if haystack[i] == first and haystack[i : i + len(needle)] == needle:
                return True
        return False

    def score_labels(self, text: str, candidates: list[tuple[str, str]]) -> dict[str, float]:
        page_tokens = self._tokens(text)
        scores = {}
        for label_id, _hypothesis in candidates:
            terms = self.lexicon.get(label_id)
            if not terms:
                if label_id not in self._warned:
                    log.warning("lexical backend has no terms for label %r; scoring 0", label_id)
                    self._warned.add(label_id)
                scores[label_id] = 0.0
                continue
            hits = sum(1 for term in terms if self._contains(page_tokens, term))
            scores[label_id] = hits / len(terms)
        return scores


def load_shipped_lexicon() -> dict[str, list[str]]:
    """Term lists for every shipped taxonomy label, keyed by label id."""
    path = Path(__file__).parent / "data" / "lexicon.json"
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def builtin_lexical_backend(lexicon: dict[str, list[str]] | None = None) -> LexicalBackend:
    """Offline classifier backed by the shipped (or a caller-supplied) lexicon."""
    return LexicalBackend(lexicon if lexicon is not None else load_shipped_lexicon())


def http_backend(endpoint: str, timeout: float = 120.0) -> "HttpBackend":
    """Classifier that defers scoring to an inference service endpoint."""
    return HttpBackend(endpoint, timeout=timeout)


class HttpBackend(ClassifierBackend):
    """Client for the zero-shot endpoint of an inference sidecar.

    Scores pass through verbatim; out-of-range values are clamped to [0,1]
    with a warning rather than rejected.
    """

    def __init__(self, endpoint: str, timeout: float = 120.0, session: requests.Session | None = None):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.session = session or requests.Session()
        self.backend_id = f"http-zeroshot:{self.endpoint}"

    def score_labels(self, text: str, candidates: list[tuple[str, str]]) -> dict[str, float]:
        url = f"{self.endpoint}/v1/zeroshot"
        body = {
            "text": text,
            "labels": [{"id": label_id, "hypothesis": hyp} for label_id, hyp in candidates],
        }
        try:
            response = self.session.post(url, json=body, timeout=self.timeout)
        except requests.RequestException as exc:
            raise BackendError(f"POST {url} failed: {exc}") from exc
        if response.status_code != 200:
            raise BackendError(f"POST {url} returned {response.status_code}")
        try:
            payload = response.json()
            raw_scores = payload["scores"]
        except (ValueError, KeyError) as exc:
            raise BackendError(f"malformed zeroshot response from {url}") from exc
        model_id = payload.get("model_id")
        if model_id:
            self.backend_id = f"http-zeroshot:{model_id}"

        scores = {}
        for label_id, _ in candidates:
            if label_id not in raw_scores:
                raise BackendError(f"response missing score for label {label_id!r}")
            value = float(raw_scores[label_id])
            if not 0.0 <= value <= 1.0:
                log.warning("score %s for %r out of [0,1]; clamping", value, label_id)
                value = min(1.0, max(0.0, value))
            scores[label_id] = value
        return scores


def _score_with_retry(
    backend: ClassifierBackend,
    text: str,
    candidates: list[tuple[str, str]],
    cfg: ClassificationConfig,
    sleep=time.sleep,
) -> dict[str, float]:
    last: Exception | None = None
    for attempt in range(cfg.max_retries):
        try:
            scores = backend.score_labels(text, candidates)
        except BackendError as exc:
            last = exc
            if attempt + 1 < cfg.max_retries:
                sleep(cfg.retry_base_delay * (2**attempt))
            continue
        missing = [label_id for label_id, _ in candidates if label_id not in scores]
        if missing:
            raise BackendError(f"backend omitted scores for {missing}")
        return scores
    raise BackendError(f"backend failed after {cfg.max_retries} attempts: {last}")


def classify_primary(
    pages: list[tuple[str, str]],
    taxonomy: Taxonomy,
    backend: ClassifierBackend,
    cfg: ClassificationConfig,
    sleep=time.sleep,
) -> list[LabelAssignment]:
    """Score every page against the taxonomy's primary categories.

    ``pages`` is (url, text) for kept pages. A category is assigned when
    its score meets or exceeds the threshold (inclusive). Pages with no
    qualifying category come back explicitly unlabeled; pages whose
    backend calls exhaust retries come back classification_failed.
    """
    candidates = label_space(taxonomy, "primary")
    assignments = []
    for url, text in pages:
        assignment = LabelAssignment(url=url, taxonomy=taxonomy.name)
        try:
            scores = _score_with_retry(backend, text, candidates, cfg, sleep=sleep)
        except BackendError as exc:
            log.warning("primary classification failed for %s: %s", url, exc)
            assignment.status = STATUS_FAILED
            assignments.append(assignment)
            continue
        retained = [
            (label_id, scores[label_id])
            for label_id, _ in candidates
            if scores[label_id] >= cfg.threshold
        ]
        assignment.primaries = retained
        assignment.status = STATUS_LABELED if retained else STATUS_UNLABELED
        assignments.append(assignment)
    return assignments


def classify_sub(
    assignments: list[LabelAssignment],
    pages: dict[str, str],
    taxonomy: Taxonomy,
    backend: ClassifierBackend,
    cfg: ClassificationConfig,
    sleep=time.sleep,
) -> list[LabelAssignment]:
    """Refine assignments with subcategory labels, gated by group size.

    For each primary category, the group is every page carrying that label
    (multi-label pages count in every group they belong to). Groups
    smaller than ``min_group`` keep their primary-level assignment and get
    no subs. Mutates and returns the same assignment objects.
    """
    groups: dict[str, list[LabelAssignment]] = {}
    for assignment in assignments:
        for pid in assignment.primary_ids():
            groups.setdefault(pid, []).append(assignment)

    for pid in taxonomy.primary_ids():
        members = groups.get(pid, [])
        if len(members) < cfg.min_group:
            continue
        candidates = label_space(taxonomy, "sub", pid)
        if not candidates:
            continue
        for assignment in members:
            text = pages.get(assignment.url)
            if text is None:
                log.warning("no text for %s; skipping sub classification", assignment.url)
                continue
            try:
                scores = _score_with_retry(backend, text, candidates, cfg, sleep=sleep)
            except BackendError as exc:
                log.warning(
                    "sub classification failed for %s under %s: %s", assignment.url, pid, exc
                )
                assignment.status = STATUS_FAILED
                continue
            assignment.subs.extend(
                (pid, sub_id, scores[sub_id])
                for sub_id, _ in candidates
                if scores[sub_id] >= cfg.threshold
            )
    return assignments
