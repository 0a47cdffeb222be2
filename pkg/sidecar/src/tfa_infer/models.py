"""Transformers-backed scorers.

Imports of ``transformers`` stay inside the constructors so the service
module (and its tests, which inject fake scorers) work without the
models extra installed.
"""

from __future__ import annotations


class TransformersZeroshotScorer:
    """NLI zero-shot scorer; each hypothesis is scored independently.

    The client sends complete hypothesis sentences, so the pipeline runs
    with an identity template and multi_label=True (entail-vs-contradict
    per label, no softmax across the candidate set).
    """

    def __init__(self, model_id: str):
        from transformers import pipeline

        self.model_id = model_id
        self._pipe = pipeline("zero-shot-classification", model=model_id, device=-1)

    def score(self, text: str, labels: list[tuple[str, str]]) -> dict[str, float]:
        hypotheses = [hypothesis for _, hypothesis in labels]
        result = self._pipe(
            text,
            candidate_labels=hypotheses,
            hypothesis_template="{}",
            multi_label=True,
        )
        by_hypothesis = dict(zip(result["labels"], result["scores"]))
        return {
            label_id: float(by_hypothesis[hypothesis])
            for label_id, hypothesis in labels
        }


class TransformersEmotionScorer:
    """Sequence classifier returning the full per-class distribution."""

    def __init__(self, model_id: str):
        from transformers import pipeline

        self.model_id = model_id
        self._pipe = pipeline("text-classification", model=model_id, top_k=None, device=-1)

    def score(self, text: str) -> dict[str, float]:
        rows = self._pipe(text)[0]
        return {row["label"].lower(): float(row["score"]) for row in rows}


def load_default_scorers(settings):
    """Both production scorers; raises if either checkpoint is unavailable."""
    return (
        TransformersZeroshotScorer(settings.zeroshot_model),
        TransformersEmotionScorer(settings.emotion_model),
    )
