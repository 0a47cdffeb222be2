"""FastAPI app factory for the inference sidecar.

Scorers are injected for tests and loaded from the configured
checkpoints otherwise; until both are ready every scoring route (and
/health) answers 503. Model access is serialized with a lock -- the
service is stateless between requests, so concurrency is limited only
by scoring throughput.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, model_validator

from tfa_infer.config import Settings

EMOTION_LABELS = ("anger", "disgust", "fear", "joy", "neutral", "sadness", "surprise")


class LabelSpec(BaseModel):
    id: str
    hypothesis: str


class ZeroshotRequest(BaseModel):
    text: str
    labels: list[LabelSpec]

    @model_validator(mode="after")
    def _no_duplicate_ids(self):
        ids = [label.id for label in self.labels]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate label ids")
        return self


class EmotionRequest(BaseModel):
    text: str


@dataclass
class ScorerState:
    zeroshot: object | None = None
    emotion: object | None = None
    error: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def ready(self) -> bool:
        return self.zeroshot is not None and self.emotion is not None


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def create_app(
    zeroshot=None,
    emotion=None,
    settings: Settings | None = None,
    load_models: bool | None = None,
) -> FastAPI:
    """Build the service.

    ``zeroshot``/``emotion`` take pre-built scorers (objects with a
    ``model_id`` and a ``score`` method). When neither is given and
    ``load_models`` is not disabled, the configured checkpoints are
    loaded in a background thread on startup.
    """
    settings = settings or Settings.from_env()
    state = ScorerState(zeroshot=zeroshot, emotion=emotion)
    if load_models is None:
        load_models = zeroshot is None and emotion is None

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if load_models and not state.ready:
            threading.Thread(target=_load, daemon=True).start()
        yield

    def _load():
        from tfa_infer.models import load_default_scorers

        try:
            state.zeroshot, state.emotion = load_default_scorers(settings)
        except Exception as exc:  # noqa: BLE001 -- surface any load failure via /health
            state.error = f"model load failed: {exc}"

    app = FastAPI(title="tfa-infer-service", lifespan=lifespan)
    app.state.scorers = state
    app.state.settings = settings

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return _error(400, f"malformed request: {exc.errors()[0].get('msg', 'invalid body')}")

    def check_text(text: str) -> tuple[str, bool] | JSONResponse:
        if len(text) > settings.reject_chars:
            return _error(413, f"text exceeds {settings.reject_chars} characters")
        if len(text) > settings.truncate_chars:
            return text[: settings.truncate_chars], True
        return text, False

    @app.post("/v1/zeroshot")
    def score_zeroshot(request: ZeroshotRequest):
        if state.zeroshot is None:
            return _error(503, "model not loaded")
        checked = check_text(request.text)
        if isinstance(checked, JSONResponse):
            return checked
        text, truncated = checked

        if request.labels:
            candidates = [(label.id, label.hypothesis) for label in request.labels]
            with state.lock:
                raw = state.zeroshot.score(text, candidates)
            scores = {}
            for label_id, _ in candidates:
                if label_id not in raw:
                    return _error(500, f"scorer returned no score for label {label_id!r}")
                scores[label_id] = min(1.0, max(0.0, float(raw[label_id])))
        else:
            scores = {}

        payload = {"scores": scores, "model_id": state.zeroshot.model_id}
        if truncated:
            payload["truncated"] = True
        return payload

    @app.post("/v1/emotion")
    def score_emotion(request: EmotionRequest):
        if state.emotion is None:
            return _error(503, "model not loaded")
        checked = check_text(request.text)
        if isinstance(checked, JSONResponse):
            return checked
        text, truncated = checked
        if not text.strip():
            return _error(400, "text must be non-empty")

        with state.lock:
            raw = state.emotion.score(text)
        if sorted(raw) != sorted(EMOTION_LABELS):
            return _error(500, f"scorer returned labels {sorted(raw)}")
        scores = {label: float(raw[label]) for label in EMOTION_LABELS}
        total = sum(scores.values())
        if abs(total - 1.0) > 0.01:
            return _error(500, f"scorer distribution sums to {total}")

        payload = {"scores": scores, "model_id": state.emotion.model_id}
        if truncated:
            payload["truncated"] = True
        return payload

    @app.get("/health")
    def health():
        if not state.ready:
            body = {"status": "error" if state.error else "loading", "model_ids": {}}
            if state.error:
                body["error"] = state.error
            return JSONResponse(body, status_code=503)
        return {
            "status": "ok",
            "model_ids": {
                "zeroshot": state.zeroshot.model_id,
                "emotion": state.emotion.model_id,
            },
        }

    return app
