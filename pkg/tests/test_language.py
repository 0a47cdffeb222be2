"""Frozen hand-labelled sentences for the n-gram language gate."""

import pytest

from tfa_audit.language import LanguageVerdict, language_check

# Hand-labelled decision set. Each entry is (text, expected_kind, expected_code);
# codes for "other" verdicts only pin the detector where the language is seeded.
LABELLED = [
    ("Support services are free and confidential for everyone who needs them.",
     "english", "en"),
    ("You are not alone; trained counsellors can help you make a safety plan today.",
     "english", "en"),
    ("Technology-facilitated abuse includes monitoring, impersonation and threats online.",
     "english", "en"),
    ("Call the national helpline to speak with someone about online harassment.",
     "english", "en"),
    ("Keep evidence of abusive messages before blocking the sender.",
     "english", "en"),
    ("Les services de soutien sont gratuits.", "other", "fr"),
    ("Nos conseillers sont disponibles pour vous accompagner chaque jour de la semaine.",
     "other", "fr"),
    ("Die Beratungsstellen sind kostenlos und vertraulich für alle Betroffenen.",
     "other", "de"),
    ("Los servicios de apoyo son gratuitos y confidenciales para todas las personas.",
     "other", "es"),
    ("I servizi di supporto sono gratuiti e riservati per tutte le persone.",
     "other", "it"),
    ("Os serviços de apoio são gratuitos e confidenciais para todas as pessoas.",
     "other", "pt"),
    ("De hulpdiensten zijn gratis en vertrouwelijk voor iedereen die ze nodig heeft.",
     "other", "nl"),
]


@pytest.mark.parametrize("text,kind,code", LABELLED, ids=[t[:32] for t, _, _ in LABELLED])
def test_labelled_sentence(text, kind, code):
    verdict = language_check(text)
    assert verdict.kind == kind
    assert verdict.code == code


@pytest.mark.parametrize("text", ["", "Hi.", "Go now", "1800RESPECT", "x" * 19])
def test_under_twenty_chars_is_undecidable(text):
    assert language_check(text) == LanguageVerdict("other", "und")


def test_twenty_chars_is_decided():
    verdict = language_check("help is available no")  # exactly 20 chars
    assert verdict.code != "und"


def test_digits_and_punctuation_only_is_undecidable():
    assert language_check("0123456789 " * 5) == LanguageVerdict("other", "und")


def test_is_english_property():
    assert language_check("The quick brown fox jumps over the lazy dog.").is_english
    assert not language_check("Les services de soutien sont gratuits.").is_english


def test_deterministic():
    text = "Support services are free and confidential."
    assert language_check(text) == language_check(text)
