from __future__ import annotations

import socket
from importlib import resources

import pytest

from phrasequest.config import load_config
from phrasequest.domain import PracticeSet


def default_config_text() -> str:
    return (
        resources.files("phrasequest").joinpath("data/game.yaml").read_text("utf-8")
    )


@pytest.fixture(scope="session")
def config():
    return load_config(default_config_text())


@pytest.fixture
def practice(config):
    return PracticeSet(
        phrase_ids=(
            "wing-it",
            "shake-off",
            "piece-of-cake",
            "break-the-ice",
            "call-it-a-day",
        )
    )


@pytest.fixture
def no_network(monkeypatch):
    """Fail loudly if anything under test opens a real socket."""

    def _blocked(*args, **kwargs):
        raise AssertionError("network access attempted in offline mode")

    monkeypatch.setattr(socket.socket, "connect", _blocked)
