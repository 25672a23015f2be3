import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


def pytest_runtest_logreport(report):
    match = re.search(r"test_acceptance\.py::test_c(\d\d)_(\w+)", report.nodeid)
    if not match:
        return
    key = (int(match.group(1)), match.group(2))
    failed = report.failed or (report.when == "setup" and report.skipped)
    if report.when == "call" or failed:
        _CRITERIA[key] = _CRITERIA.get(key, True) and not failed and not report.skipped


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), ok in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"criterion {num:2d} {name.replace('_', ' ')}: {'PASS' if ok else 'FAIL'}")
