"""Service settings, resolved from TFA_INFER_* environment variables."""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_PREFIX = "TFA_INFER_"

# Checkpoints the service loads when none are configured.
DEFAULT_ZEROSHOT_MODEL = "MoritzLaurer/deberta-v3-large-zeroshot-v2.0"
DEFAULT_EMOTION_MODEL = "j-hartmann/emotion-english-distilroberta-base"


@dataclass(frozen=True)
class Settings:
    zeroshot_model: str = DEFAULT_ZEROSHOT_MODEL
    emotion_model: str = DEFAULT_EMOTION_MODEL
    # Text beyond truncate_chars is cut head-first and flagged in the
    # response; text beyond reject_chars is refused outright with 413.
    truncate_chars: int = 4000
    reject_chars: int = 100_000
    host: str = "127.0.0.1"
    port: int = 8750

    @classmethod
    def from_env(cls, env=os.environ) -> "Settings":
        def get(name: str, default):
            raw = env.get(ENV_PREFIX + name)
            if raw is None:
                return default
            return type(default)(raw)

        return cls(
            zeroshot_model=get("ZEROSHOT_MODEL", cls.zeroshot_model),
            emotion_model=get("EMOTION_MODEL", cls.emotion_model),
            truncate_chars=get("TRUNCATE_CHARS", cls.truncate_chars),
            reject_chars=get("REJECT_CHARS", cls.reject_chars),
            host=get("HOST", cls.host),
            port=get("PORT", cls.port),
        )
