from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = {}


@pytest.fixture
def ac_report():
    """Record one PASS/FAIL line per acceptance criterion; shown in the summary."""

    def report(tag, ok, detail):
        line = f"{tag} {'PASS' if ok else 'FAIL'}: {detail}"
        print(line)
        _CRITERIA[tag] = line
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for tag in sorted(_CRITERIA, key=lambda t: int(t.split("-")[1])):
        terminalreporter.write_line(_CRITERIA[tag])
