"""Fixtures for the sidecar suite: shared contract cases + a wired client."""

import json

import pytest

pytest.importorskip("fastapi", reason="sidecar dependencies not installed")
pytest.importorskip("tfa_infer", reason="sidecar package not installed")

from fastapi.testclient import TestClient  # noqa: E402

from service_fakes import CASES_PATH, FakeEmotionScorer, FakeZeroshotScorer  # noqa: E402
from tfa_infer.app import create_app  # noqa: E402
from tfa_infer.config import Settings  # noqa: E402


@pytest.fixture(scope="session")
def cases():
    return json.loads(CASES_PATH.read_text())


@pytest.fixture(scope="session")
def settings(cases):
    return Settings(
        truncate_chars=cases["limits"]["truncate_chars"],
        reject_chars=cases["limits"]["reject_chars"],
    )


@pytest.fixture(scope="session")
def client(settings):
    app = create_app(
        zeroshot=FakeZeroshotScorer(), emotion=FakeEmotionScorer(), settings=settings
    )
    with TestClient(app) as test_client:
        yield test_client
