import sys
from pathlib import Path

import pytest

from ctcsim.tm_core import parse_machine

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

HALTING = {"halter1": 1, "delay5": 5}
NON_HALTING = ["rightmover", "pingpong"]
MACHINES = [*HALTING, *NON_HALTING]


def load(name):
    return parse_machine((CORPUS / f"{name}.tm").read_text())


@pytest.fixture
def halter():
    return load("halter1")


@pytest.fixture
def delay5():
    return load("delay5")


@pytest.fixture
def rightmover():
    return load("rightmover")


@pytest.fixture(params=MACHINES)
def corpus_machine(request):
    return request.param, load(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
