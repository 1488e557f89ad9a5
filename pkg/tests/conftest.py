from __future__ import annotations

import os

import pytest

from nicelie.pipeline import classify_dimension

DIM9 = os.environ.get("NICELIE_N9") == "1"


@pytest.fixture(scope="session")
def classified():
    cache: dict[int, list] = {}

    def get(n: int):
        if n not in cache:
            cache[n] = classify_dimension(n)
        return cache[n]

    return get


# --- acceptance summary -----------------------------------------------------------

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    detail = dict(report.user_properties).get("detail", "")
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome == "skipped" or report.failed:
        prev = _ACCEPTANCE.get(name)
        if prev and prev[0] == "FAIL":
            return
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if outcome == "SKIP" and isinstance(report.longrepr, tuple):
            detail = report.longrepr[2].removeprefix("Skipped: ")
        _ACCEPTANCE[name] = (outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome, detail = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{outcome:4}  {name}: {detail}")
