import json
import os
import sys
from importlib import resources

import pytest

sys.path.insert(0, os.path.dirname(__file__))

UNKNOT = "X 1 2 2 1"  # one negative kink: 0-resolution is one circle
HOPF = "X 3 1 4 2; X 1 3 2 4"  # both crossings positive
TREFOIL = "X 1 4 2 5; X 3 6 4 1; X 5 2 6 3"  # left-handed
FIGURE_EIGHT = "X 4 2 5 1; X 8 6 1 5; X 6 3 7 4; X 2 7 3 8"


# pass/fail lines recorded by the acceptance tests, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def load_corpus():
    return json.loads(resources.files("khoflow").joinpath("data/corpus.json").read_text())


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()
