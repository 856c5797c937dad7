import sys

import pytest

from bdlab import stages


@pytest.fixture(scope="session")
def micro():
    return stages.micro_stage()


@pytest.fixture(scope="session")
def t1_stage():
    return stages.t1_scripted_stage()


@pytest.fixture
def wstage():
    return stages.witness_stage()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for text in sorted(mod.LINES, key=lambda t: int(t.split()[1].rstrip(":"))):
        terminalreporter.write_line(text)
