"""Release acceptance criteria, one test each.

Every test prints a PASS/FAIL line; the same lines are repeated in the
terminal summary by ``conftest.py``.
"""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from sym2gw.acceptance import CRITERIA, CriterionResult, run_criterion
from sym2gw.wdvv_engine import InvariantStore, WdvvEngine

RESULTS: dict[int, CriterionResult] = {}


@pytest.fixture(scope="module")
def fresh_engine() -> WdvvEngine:
    # not the session engine: criterion 6 must see the reconstruction happen
    return WdvvEngine(InvariantStore())


def _record(result: CriterionResult) -> None:
    RESULTS[result.number] = result
    print(result.line())


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, fresh_engine):
    result = run_criterion(number, fresh_engine)
    _record(result)
    assert result.passed, "; ".join(result.details)


def _selftest(cache):
    proc = subprocess.run(
        [sys.executable, "-m", "sym2gw", "selftest", "--quick", "--json", "--cache", str(cache)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode in (0, 1), proc.stderr
    return cache.read_bytes(), proc.stdout


@pytest.mark.slow
def test_criterion_12_consecutive_selftests(tmp_path):
    title = "two consecutive runs give byte-identical caches and JSON"
    cache = tmp_path / "selftest.cache"
    first = _selftest(cache)
    second = _selftest(cache)
    problems = []
    if first[0] != second[0]:
        problems.append("cache files differ")
    if first[1] != second[1]:
        problems.append("JSON outputs differ")
    json.loads(first[1])
    _record(CriterionResult(12, title, not problems, problems))
    assert not problems
