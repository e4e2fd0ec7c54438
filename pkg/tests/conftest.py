import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from nupbrlab.model import parse_model  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

E1 = {
    "schema": 1,
    "probabilities": ["1/2", "1/2"],
    "filtration": [[[0, 1]], [[0], [1]]],
    "assets": [[["0", "0"], ["1", "-1"]]],
    "tau": [1, 0],
}

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def e1():
    return parse_model(E1)


@pytest.fixture
def e1_dict():
    return dict(E1)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
