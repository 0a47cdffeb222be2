"""Inference sidecar: zero-shot and emotion scoring over JSON/HTTP."""

from tfa_infer.app import EMOTION_LABELS, create_app
from tfa_infer.config import Settings

__all__ = ["EMOTION_LABELS", "Settings", "create_app"]
