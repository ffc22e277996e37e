"""Collects acceptance results and prints one line per criterion after the run."""

import re

_results = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num, name = int(m.group(1)), m.group(2).replace("_", " ")
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results[num] = (name, report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        name, outcome, secs = _results[num]
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:>2}: {mark}  {name}  ({secs:.2f}s)")
