import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("fracsub", deadline=None, max_examples=40)
settings.load_profile("fracsub")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record one acceptance verdict; the summary is printed at the end of the run."""
    def record(number: int, name: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] #{number} {name}: {detail}"
        ACCEPTANCE[number] = line
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
