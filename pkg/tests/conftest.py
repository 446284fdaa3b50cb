import pytest

from refreshalloc import BerModel, DeviceParams
from refreshalloc.metrics import DEFAULT_ALPHA, DEFAULT_BETA


@pytest.fixture
def model():
    return BerModel(DEFAULT_ALPHA, DEFAULT_BETA)


@pytest.fixture
def params():
    return DeviceParams(bits=8, delta=0.064, gamma=1)


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion, printed at the end of the run."""

    def record(label, ok, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        print(_ACCEPTANCE_LINES[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
