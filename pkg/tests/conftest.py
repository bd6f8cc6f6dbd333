from pathlib import Path

import pytest

from chorc.surface import parse_chor, parse_network, parse_state
from chorc.verify import build_corpus

GOLDEN = Path(__file__).resolve().parent.parent / "golden"


def golden_path(name: str) -> Path:
    return GOLDEN / name


def chor(name: str):
    return parse_chor((GOLDEN / name).read_text())


def net(name: str):
    return parse_network((GOLDEN / name).read_text())


def state(name: str):
    return parse_state((GOLDEN / name).read_text())


@pytest.fixture(scope="session")
def corpus():
    return build_corpus(500, seed=0, depth=4, group=4, processes=5)
