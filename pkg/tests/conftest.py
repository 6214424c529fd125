import pytest

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or "criterion" not in marker.kwargs:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _ACCEPTANCE[marker.kwargs["criterion"]] = (marker.kwargs.get("title", item.name), report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        title, outcome = _ACCEPTANCE[k]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"AC{k:02d} {verdict}  {title}")
