from __future__ import annotations

import pytest

from sym2gw.wdvv_engine import WdvvEngine


@pytest.fixture(scope="session")
def engine() -> WdvvEngine:
    """One in-memory engine shared by the whole session; values are final once solved."""
    return WdvvEngine()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number].line())
