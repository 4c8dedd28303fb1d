import logging
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA: dict[int, tuple[str, str, str]] = {}
NOTES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, name): acceptance criterion")


@pytest.fixture(autouse=True)
def _quiet_restructure_warnings():
    # punctuation-only constituents are common in random trees
    logging.getLogger("punctbin.restructure").setLevel(logging.ERROR)
    yield
    logging.getLogger("punctbin.restructure").setLevel(logging.NOTSET)


@pytest.fixture
def note(request):
    """Attach a measurement line to the current criterion's summary."""
    number = request.node.get_closest_marker("criterion").args[0]

    def write(text):
        NOTES[number] = text
        print(text)
    return write


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, name = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome
                                 != "passed"):
        status = {"passed": "PASS", "failed": "FAIL",
                  "skipped": "SKIP"}[report.outcome]
        detail = ""
        if report.outcome == "skipped" and isinstance(report.longrepr, tuple):
            detail = report.longrepr[2]
        CRITERIA[number] = (name, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        name, status, detail = CRITERIA[number]
        line = "criterion %d %-32s %s" % (number, name, status)
        if detail:
            line += "  (%s)" % detail
        terminalreporter.write_line(line)
        if number in NOTES:
            terminalreporter.write_line("    " + NOTES[number])
