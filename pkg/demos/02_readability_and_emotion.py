"""
Readability scores and emotion profiles
=======================================

Runs the affect stage's two measurements over contrasting texts: the
Flesch Reading Ease / ARI / composite accessibility score, and the
7-way emotion distribution (deterministic mock backend here; the same
code path serves real model scores over HTTP).
"""

from tfa_audit.affect import MockEmotionBackend, emotion_profile, readability

SAMPLES = {
    "plain help text": (
        "You are not alone. Help is free and private. Call any time of day. "
        "A trained counsellor will listen and plan the next steps with you."
    ),
    "dense policy text": (
        "Interdisciplinary organizational accountability methodologies "
        "necessitate comprehensive multistakeholder communication "
        "infrastructure evaluation frameworks across jurisdictional "
        "regulatory environments."
    ),
}

backend = MockEmotionBackend()

for name, text in SAMPLES.items():
    scores = readability(text)
    profile = emotion_profile(text, backend)
    print(name)
    print(f"  words/sentence: {scores.counts.words / scores.counts.sentences:.1f}")
    # Flesch: higher = easier; can go negative for very dense prose.
    print(f"  flesch: {scores.flesch:8.2f}   ari: {scores.ari:6.2f}   "
          f"accessibility: {scores.accessibility:.1f}/100")
    top = sorted(profile.scores.items(), key=lambda kv: -kv[1])[:3]
    print(f"  dominant emotion: {profile.dominant} "
          f"({', '.join(f'{label} {value:.2f}' for label, value in top)})")
    print()
