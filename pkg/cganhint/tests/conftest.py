"""Shared pytest wiring.

Tests marked @pytest.mark.acceptance("<label>") get one summary line each:

    ACCEPTANCE <label>: PASS|FAIL

so the criteria can be eyeballed at the end of any run.
"""

from __future__ import annotations

import pytest


def pytest_configure(config):
    config._acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label = marker.args[0]
    store = item.config._acceptance
    if report.when == "call":
        verdict = "PASS" if report.passed else "FAIL"
    elif report.failed or report.skipped:
        verdict = "FAIL"
    else:
        return
    # a criterion split across parametrized cases fails if any case does
    if store.get(label) != "FAIL":
        store[label] = verdict


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = getattr(config, "_acceptance", None)
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for label, verdict in store.items():
        terminalreporter.write_line(f"ACCEPTANCE {label}: {verdict}")
