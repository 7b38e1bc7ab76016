from pathlib import Path

import pytest

from dexc.parser import parse_signature, parse_term
from dexc.semantics import build_model

ROOT = Path(__file__).resolve().parents[1]
THEOREMS = ROOT / "theorems"

F1_TEXT = "type B\nop f : B -> B\nexception E1 of B\nexception E2 of B\n"


@pytest.fixture(scope="session")
def f1():
    return parse_signature(F1_TEXT)


@pytest.fixture(scope="session")
def f1_model(f1):
    # f swaps the two values
    return build_model(f1, {"B": ["b0", "b1"]}, {"f": {"b0": "b1", "b1": "b0"}}, "f1")


@pytest.fixture
def term(f1):
    return lambda text: parse_term(f1, text)
