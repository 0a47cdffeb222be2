"""HTML text extraction, decoding, paragraph spans, and page filters."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfa_audit.extract import (
    CleanPage,
    apply_filters,
    clean_page,
    decode_html,
    dedup_key,
    extract_text,
    word_count,
)

from suite_paths import SITE_ROOT


def wrap(body: str) -> bytes:
    return f"<!DOCTYPE html><html><head><title>t</title></head><body>{body}</body></html>".encode()


class TestExtractText:
    def test_script_content_removed(self):
        result = extract_text(wrap("<p>Help is available.</p><script>x()</script>"))
        assert result.text == "Help is available."

    def test_nav_removed_main_kept(self):
        result = extract_text(wrap("<nav>Home About</nav><main><p>Call 1800RESPECT.</p></main>"))
        assert result.text == "Call 1800RESPECT."

    @pytest.mark.parametrize("element", ["script", "style", "noscript", "template",
                                         "nav", "header", "footer", "aside"])
    def test_all_boilerplate_landmarks_removed(self, element):
        html = wrap(f"<{element}>BOILER TEXT</{element}><p>Real content.</p>")
        result = extract_text(html)
        assert "BOILER" not in result.text
        assert "Real content." in result.text

    def test_three_paragraph_blocks_give_three_spans(self):
        result = extract_text(wrap("<p>One alpha.</p><p>Two beta.</p><p>Three gamma.</p>"))
        assert len(result.paragraph_spans) == 3
        assert result.text.count("\n\n") == 2

    def test_spans_tile_text_without_overlap(self):
        result = extract_text(wrap("<p>First block here.</p><div>Second block.</div><p>Third.</p>"))
        spans = result.paragraph_spans
        assert spans[0][0] == 0
        for (a_start, a_end), (b_start, b_end) in zip(spans, spans[1:]):
            assert a_end == b_start
        assert spans[-1][1] == len(result.text)

    def test_whitespace_collapsed(self):
        result = extract_text(wrap("<p>spaced    out\n\ttext</p>"))
        assert result.text == "spaced out text"

    def test_idempotent_on_own_output(self):
        first = extract_text(wrap("<p>One paragraph here.</p><p>And another one.</p>"))
        second = extract_text(first.text)
        assert second.text == first.text
        assert second.paragraph_spans == first.paragraph_spans

    def test_malformed_markup_uses_flagged_fallback(self):
        # A CDATA-style bomb html.parser cannot structure still yields text.
        result = extract_text(b"<p>visible words</p><![bogus " + b"\xff" * 3 + b">")
        assert "visible words" in result.text


class TestDecodeHtml:
    def test_utf8_default(self):
        assert "café" in decode_html("café".encode("utf-8"))

    def test_bom_wins(self):
        data = b"\xef\xbb\xbf" + "résumé".encode("utf-8")
        assert "résumé" in decode_html(data)

    def test_meta_charset_sniffed(self):
        html = '<html><head><meta charset="iso-8859-1"></head><body>Chloé</body></html>'
        assert "Chloé" in decode_html(html.encode("iso-8859-1"))

    def test_undeclared_binary_degrades_lossily(self):
        text = decode_html(b"<p>ok</p>\xff\xfe")
        assert "ok" in text


ENGLISH_SENTENCE = "The support team offers free and private help every day."  # 10 words


def english_words(n: int) -> str:
    """Readable English filler with exactly ``n`` countable words."""
    words = (ENGLISH_SENTENCE.rstrip(".").split() * ((n // 10) + 1))[:n]
    return " ".join(words) + "."


class TestFilters:
    def make_page(self, text: str, url="https://x.org.au/p") -> CleanPage:
        return clean_page(url, wrap(f"<p>{text}</p>"))

    def test_empty_dropped_first(self):
        page = apply_filters(self.make_page(""), min_words=30)
        assert page.verdict == "dropped" and page.drop_reason == "empty"

    def test_29_words_dropped_too_short(self):
        page = apply_filters(self.make_page(english_words(29)), min_words=30)
        assert page.drop_reason == "too_short"
        assert page.word_count == 29

    def test_30_words_kept(self):
        page = apply_filters(self.make_page(english_words(30)), min_words=30)
        assert page.verdict == "kept"
        assert page.kept

    def test_non_english_dropped(self):
        text = (
            "Les services de soutien sont gratuits et confidentiels pour toutes les "
            "personnes concernées par la violence numérique dans chaque "
            "région du pays avec des conseillers formés disponibles chaque "
            "jour pour vous accompagner sans jugement"
        )
        page = apply_filters(self.make_page(text), min_words=30)
        assert page.drop_reason == "non_english"

    def test_duplicate_second_dropped(self):
        text = english_words(40)
        seen: set = set()
        first = apply_filters(self.make_page(text, url="https://x.org.au/a"), 30, seen)
        second = apply_filters(self.make_page(text, url="https://x.org.au/b"), 30, seen)
        assert first.kept
        assert second.drop_reason == "duplicate"

    def test_kept_invariant(self):
        page = apply_filters(self.make_page(english_words(40)), min_words=30)
        assert page.kept and page.word_count >= 30 and page.text


class TestDedupKey:
    def test_case_and_whitespace_insensitive(self):
        assert dedup_key("Hello  World") == dedup_key("hello world") == dedup_key(" HELLO\nWORLD ")

    def test_different_text_different_key(self):
        assert dedup_key("alpha") != dedup_key("beta")

    def test_symmetric_and_transitive_on_fixture_corpus(self):
        # 10 pages, 2 duplicates -> 8 distinct keys.
        texts = [f"page number {i} content" for i in range(8)]
        texts.append(texts[0])
        texts.append(texts[3].upper())
        keys = [dedup_key(t) for t in texts]
        assert len(set(keys)) == 8
        assert keys[8] == keys[0]
        assert keys[9] == keys[3]


class TestFixturePages:
    def test_ten_fixture_pages_have_no_boilerplate(self):
        pages = sorted(SITE_ROOT.rglob("*.html"))[:10]
        assert len(pages) == 10
        for path in pages:
            result = extract_text(path.read_bytes())
            for sentinel in ("analyticsToken", "nav-list", "All rights reserved",
                             "Site navigation", "display: flex"):
                assert sentinel not in result.text, (path, sentinel)

    def test_fixture_accounting_total_is_kept_plus_dropped(self):
        seen: set = set()
        verdicts = []
        for path in sorted(SITE_ROOT.rglob("*.html")):
            page = clean_page(path.as_uri(), path.read_bytes())
            verdicts.append(apply_filters(page, 30, seen))
        kept = sum(1 for p in verdicts if p.kept)
        dropped = sum(1 for p in verdicts if not p.kept)
        assert kept + dropped == len(verdicts)
        reasons = {}
        for p in verdicts:
            if p.drop_reason:
                reasons[p.drop_reason] = reasons.get(p.drop_reason, 0) + 1
        assert sum(reasons.values()) == dropped


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=400))
def test_word_count_never_negative_and_spans_tile(text):
    result = extract_text(f"<p>{text}</p>")
    assert word_count(result.text) >= 0
    offset = 0
    for start, end in result.paragraph_spans:
        assert start == offset and end >= start
        offset = end
    assert offset == len(result.text)
