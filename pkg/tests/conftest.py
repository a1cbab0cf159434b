"""Collects acceptance outcomes and prints one pass/fail line per criterion."""

from collections import OrderedDict

import pytest

_RESULTS = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion this test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        cid, title = marker.args
        entry = _RESULTS.setdefault(cid, {"title": title, "ok": True, "notes": []})
        entry["ok"] &= report.passed
        for key, value in item.user_properties:
            entry["notes"].append(f"{key}={value}")
        if not report.passed:
            entry["notes"].append(f"{item.name} {report.outcome}")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, entry in _RESULTS.items():
        status = "PASS" if entry["ok"] else "FAIL"
        line = f"[{status}] criterion {cid}: {entry['title']}"
        if entry["notes"]:
            line += "  (" + "; ".join(entry["notes"]) + ")"
        terminalreporter.write_line(line)
