"""Threshold/gating semantics, backends, and retry behaviour."""

import random

import pytest

from tfa_audit.classify import (
    STATUS_FAILED,
    STATUS_LABELED,
    STATUS_UNLABELED,
    BackendError,
    ClassificationConfig,
    ClassifierBackend,
    HttpBackend,
    LabelAssignment,
    LexicalBackend,
    MockBackend,
    builtin_lexical_backend,
    classify_primary,
    classify_sub,
    load_shipped_lexicon,
    _score_with_retry,
)
from tfa_audit.taxonomy import load_shipped, load_taxonomy

from suite_paths import SITE_ROOT

TOY = load_taxonomy({
    "name": "toy",
    "version": "test-v1",
    "categories": [
        {
            "id": "alpha",
            "label": "alpha",
            "description": "first primary",
            "subcategories": [
                {"id": "alpha.one", "label": "alpha one", "description": "sub one"},
                {"id": "alpha.two", "label": "alpha two", "description": "sub two"},
            ],
        },
        {
            "id": "beta",
            "label": "beta",
            "description": "second primary",
            "subcategories": [
                {"id": "beta.one", "label": "beta one", "description": "sub one"},
            ],
        },
    ],
})

NO_SLEEP = lambda _: None  # noqa: E731


class TableBackend(ClassifierBackend):
    """Scores read from a {text: {label: score}} table; everything else 0."""

    backend_id = "table"

    def __init__(self, table):
        self.table = table

    def score_labels(self, text, candidates):
        row = self.table.get(text, {})
        return {label_id: row.get(label_id, 0.0) for label_id, _ in candidates}


class TestThreshold:
    def test_boundary_is_inclusive(self):
        backend = TableBackend({"page": {"alpha": 0.50, "beta": 0.499}})
        cfg = ClassificationConfig(threshold=0.5)
        [assignment] = classify_primary([("u", "page")], TOY, backend, cfg, sleep=NO_SLEEP)
        assert assignment.primary_ids() == ["alpha"]
        assert assignment.status == STATUS_LABELED

    def test_no_label_meets_threshold(self):
        backend = TableBackend({"page": {"alpha": 0.2, "beta": 0.499}})
        cfg = ClassificationConfig(threshold=0.5)
        [assignment] = classify_primary([("u", "page")], TOY, backend, cfg, sleep=NO_SLEEP)
        assert assignment.primaries == []
        assert assignment.status == STATUS_UNLABELED

    def test_multi_label_retained_in_document_order(self):
        backend = TableBackend({"page": {"alpha": 0.9, "beta": 0.6}})
        cfg = ClassificationConfig(threshold=0.5)
        [assignment] = classify_primary([("u", "page")], TOY, backend, cfg, sleep=NO_SLEEP)
        assert assignment.primary_ids() == ["alpha", "beta"]

    def test_raising_threshold_only_removes_labels(self):
        # Monotonicity: over seeded random score tables, the label set at
        # threshold 0.6 is always a subset of the set at threshold 0.4.
        rng = random.Random(20260814)
        labels = [node.id for node in TOY.roots]
        for trial in range(500):
            text = f"page-{trial}"
            table = {text: {label: rng.random() for label in labels}}
            backend = TableBackend(table)
            pages = [("u", text)]
            low = classify_primary(pages, TOY, backend,
                                   ClassificationConfig(threshold=0.4), sleep=NO_SLEEP)
            high = classify_primary(pages, TOY, backend,
                                    ClassificationConfig(threshold=0.6), sleep=NO_SLEEP)
            assert set(high[0].primary_ids()) <= set(low[0].primary_ids())


def tagged_pages(n, label="alpha", score=0.9):
    """n pages all scoring `score` for `label` and 0 elsewhere."""
    pages = [(f"https://x.org.au/p{i}", f"text {i}") for i in range(n)]
    table = {text: {label: score, f"{label}.one": 0.8, f"{label}.two": 0.2}
             for _, text in pages}
    return pages, TableBackend(table)


class TestSubGating:
    def run_both_stages(self, n, min_group):
        pages, backend = tagged_pages(n)
        cfg = ClassificationConfig(threshold=0.5, min_group=min_group)
        assignments = classify_primary(pages, TOY, backend, cfg, sleep=NO_SLEEP)
        return classify_sub(assignments, dict(pages), TOY, backend, cfg, sleep=NO_SLEEP)

    def test_fourteen_pages_get_no_subs(self):
        assignments = self.run_both_stages(14, min_group=15)
        assert all(a.subs == [] for a in assignments)
        assert all(a.status == STATUS_LABELED for a in assignments)

    def test_fifteen_pages_get_subs(self):
        assignments = self.run_both_stages(15, min_group=15)
        assert all(a.subs == [("alpha", "alpha.one", 0.8)] for a in assignments)

    def test_multilabel_page_counts_in_every_group(self):
        # 15 alpha-only pages + 1 alpha+beta page: beta's group has a single
        # member, stays gated; alpha's group (16) is scored.
        pages, _ = tagged_pages(15)
        table = {text: {"alpha": 0.9, "alpha.one": 0.8} for _, text in pages}
        pages.append(("https://x.org.au/both", "both text"))
        table["both text"] = {"alpha": 0.9, "beta": 0.9,
                              "alpha.one": 0.8, "beta.one": 0.9}
        backend = TableBackend(table)
        cfg = ClassificationConfig(threshold=0.5, min_group=15)
        assignments = classify_primary(pages, TOY, backend, cfg, sleep=NO_SLEEP)
        classify_sub(assignments, dict(pages), TOY, backend, cfg, sleep=NO_SLEEP)
        both = assignments[-1]
        assert both.primary_ids() == ["alpha", "beta"]
        assert ("alpha", "alpha.one", 0.8) in both.subs
        assert not any(sub[0] == "beta" for sub in both.subs)


class FlakyBackend(ClassifierBackend):
    backend_id = "flaky"

    def __init__(self, failures, inner):
        self.failures = failures
        self.inner = inner
        self.attempts = 0

    def score_labels(self, text, candidates):
        self.attempts += 1
        if self.attempts <= self.failures:
            raise BackendError("transient")
        return self.inner.score_labels(text, candidates)


class TestRetry:
    def test_two_failures_then_success_with_backoff(self):
        backend = FlakyBackend(2, TableBackend({"page": {"alpha": 0.9}}))
        cfg = ClassificationConfig(max_retries=3, retry_base_delay=0.5)
        delays = []
        scores = _score_with_retry(backend, "page", [("alpha", "h"), ("beta", "h")],
                                   cfg, sleep=delays.append)
        assert scores["alpha"] == 0.9
        assert delays == [0.5, 1.0]
        assert backend.attempts == 3

    def test_exhausted_retries_mark_page_failed(self):
        backend = FlakyBackend(99, TableBackend({}))
        cfg = ClassificationConfig(max_retries=3)
        [assignment] = classify_primary([("u", "page")], TOY, backend, cfg, sleep=NO_SLEEP)
        assert assignment.status == STATUS_FAILED
        assert assignment.primaries == []
        assert backend.attempts == 3

    def test_sub_failure_marks_failed_but_keeps_primaries(self):
        pages, good = tagged_pages(15)
        cfg = ClassificationConfig(min_group=15, max_retries=3)
        assignments = classify_primary(pages, TOY, good, cfg, sleep=NO_SLEEP)
        broken = FlakyBackend(999, good)
        classify_sub(assignments, dict(pages), TOY, broken, cfg, sleep=NO_SLEEP)
        assert all(a.status == STATUS_FAILED for a in assignments)
        assert all(a.primary_ids() == ["alpha"] for a in assignments)

    def test_incomplete_scores_are_an_error(self):
        class Partial(ClassifierBackend):
            backend_id = "partial"

            def score_labels(self, text, candidates):
                return {"alpha": 1.0}

        with pytest.raises(BackendError, match="omitted"):
            _score_with_retry(Partial(), "t", [("alpha", "h"), ("beta", "h")],
                              ClassificationConfig(), sleep=NO_SLEEP)


class TestMockBackend:
    def test_scores_in_unit_interval_and_deterministic(self):
        backend = MockBackend()
        candidates = [("alpha", "h1"), ("beta", "h2")]
        first = backend.score_labels("some text", candidates)
        assert first == backend.score_labels("some text", candidates)
        assert all(0.0 <= v <= 1.0 for v in first.values())

    def test_different_text_changes_scores(self):
        backend = MockBackend()
        candidates = [("alpha", "h")]
        assert backend.score_labels("a", candidates) != backend.score_labels("b", candidates)


class TestLexicalBackend:
    def test_three_of_four_terms_scores_075(self):
        backend = LexicalBackend({"cat": ["stalking", "location tracking", "gps", "spyware"]})
        text = "He admitted to stalking her using GPS and installing spyware."
        assert backend.score_labels(text, [("cat", "h")]) == {"cat": 0.75}

    def test_term_must_be_contiguous_word_sequence(self):
        backend = LexicalBackend({"cat": ["location tracking"]})
        assert backend.score_labels("location of the tracking", [("cat", "h")]) == {"cat": 0.0}
        assert backend.score_labels("covert location tracking", [("cat", "h")]) == {"cat": 1.0}

    def test_empty_text_scores_zero_everywhere(self):
        backend = builtin_lexical_backend()
        taxonomy = load_shipped("types")
        candidates = [(n.id, n.hypothesis) for n in taxonomy.roots]
        scores = backend.score_labels("", candidates)
        assert set(scores.values()) == {0.0}

    def test_unknown_label_scores_zero_with_single_warning(self, caplog):
        backend = LexicalBackend({})
        with caplog.at_level("WARNING"):
            backend.score_labels("text", [("ghost", "h")])
            backend.score_labels("text", [("ghost", "h")])
        warnings = [r for r in caplog.records if "ghost" in r.message]
        assert len(warnings) == 1

    def test_shipped_lexicon_covers_every_shipped_label(self):
        lexicon = load_shipped_lexicon()
        for name in ("types", "prevention", "detection", "support"):
            taxonomy = load_shipped(name)
            for node in taxonomy.roots:
                assert lexicon.get(node.id), node.id
                for child in node.children:
                    assert lexicon.get(child.id), child.id

    def test_fixture_harassment_page_tops_harassment(self):
        html = (SITE_ROOT / "safety" / "harassment.html").read_bytes()
        from tfa_audit.extract import extract_text

        text = extract_text(html).text
        taxonomy = load_shipped("types")
        backend = builtin_lexical_backend()
        scores = backend.score_labels(text, [(n.id, n.hypothesis) for n in taxonomy.roots])
        top = max(scores, key=scores.get)
        assert top == "harassment"
        assert scores["harassment"] >= 0.5


class FakeResponse:
    def __init__(self, status_code=200, payload=None):
        self.status_code = status_code
        self._payload = payload or {}

    def json(self):
        return self._payload


class FakeSession:
    def __init__(self, response):
        self.response = response
        self.calls = []

    def post(self, url, json=None, timeout=None):
        self.calls.append((url, json))
        return self.response


class TestHttpBackend:
    CANDIDATES = [("alpha", "alpha: first"), ("beta", "beta: second")]

    def test_request_shape_and_model_id(self):
        payload = {"scores": {"alpha": 0.7, "beta": 0.2}, "model_id": "zs-model"}
        session = FakeSession(FakeResponse(payload=payload))
        backend = HttpBackend("http://svc:9000/", session=session)
        scores = backend.score_labels("page text", self.CANDIDATES)
        url, body = session.calls[0]
        assert url == "http://svc:9000/v1/zeroshot"
        assert body == {
            "text": "page text",
            "labels": [{"id": "alpha", "hypothesis": "alpha: first"},
                       {"id": "beta", "hypothesis": "beta: second"}],
        }
        assert scores == {"alpha": 0.7, "beta": 0.2}
        assert backend.backend_id == "http-zeroshot:zs-model"

    def test_out_of_range_scores_clamped(self):
        payload = {"scores": {"alpha": 1.4, "beta": -0.2}}
        backend = HttpBackend("http://svc:9000", session=FakeSession(FakeResponse(payload=payload)))
        assert backend.score_labels("t", self.CANDIDATES) == {"alpha": 1.0, "beta": 0.0}

    def test_missing_label_raises(self):
        payload = {"scores": {"alpha": 0.7}}
        backend = HttpBackend("http://svc:9000", session=FakeSession(FakeResponse(payload=payload)))
        with pytest.raises(BackendError, match="beta"):
            backend.score_labels("t", self.CANDIDATES)

    def test_http_error_raises(self):
        backend = HttpBackend("http://svc:9000", session=FakeSession(FakeResponse(503)))
        with pytest.raises(BackendError):
            backend.score_labels("t", self.CANDIDATES)


class TestRecords:
    def test_round_trip(self):
        assignment = LabelAssignment(url="https://x.org.au/p", taxonomy="types")
        assignment.primaries = [("harassment", 0.82)]
        assignment.subs = [("harassment", "harassment.threats", 0.6)]
        assignment.status = STATUS_LABELED
        cfg = ClassificationConfig(threshold=0.5, min_group=15)
        record = assignment.to_record("mock-zeroshot-v1", cfg)
        assert record["backend_id"] == "mock-zeroshot-v1"
        assert record["config"] == {"threshold": 0.5, "min_group": 15}
        back = LabelAssignment.from_record(record)
        assert back.url == assignment.url
        assert back.primaries == assignment.primaries
        assert back.subs == assignment.subs
        assert back.status == assignment.status

    @pytest.mark.parametrize("kwargs", [
        {"threshold": -0.1}, {"threshold": 1.1}, {"min_group": 0},
        {"max_retries": 0}, {"retry_base_delay": -1.0}, {"batch_size": 0},
    ])
    def test_config_bounds(self, kwargs):
        with pytest.raises(ValueError):
            ClassificationConfig(**kwargs)
