import sys
from pathlib import Path

import pytest

from causalmc.dsl import parse_model

REPO = Path(__file__).resolve().parents[1]
MODELS = REPO / "models"

sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture(scope="session")
def ex1_doc():
    path = MODELS / "ex1.model"
    return parse_model(path.read_text(encoding="utf-8"), path=str(path))


@pytest.fixture(scope="session")
def ex1(ex1_doc):
    return ex1_doc.model


@pytest.fixture(scope="session")
def micro_doc():
    path = MODELS / "microservice.model"
    return parse_model(path.read_text(encoding="utf-8"), path=str(path))


@pytest.fixture(scope="session")
def micro(micro_doc):
    return micro_doc.model


@pytest.fixture(scope="session")
def micro_f1(micro_doc):
    return micro_doc.configuration("f1")


@pytest.fixture(scope="session")
def micro_f2(micro_doc):
    return micro_doc.configuration("f2")
