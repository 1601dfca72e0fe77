import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    key = marker.args[0]
    ok = report.passed and not (report.when == "setup" and report.skipped)
    if report.when == "setup" and report.passed:
        return
    texts, prev_ok = _criteria.get(key, ([], True))
    if marker.args[1] not in texts:
        texts.append(marker.args[1])
    _criteria[key] = (texts, prev_ok and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        texts, ok = _criteria[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {'; '.join(texts)}")
