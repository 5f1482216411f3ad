import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion checked by the test")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    number, text = marker.args
    detail = "; ".join(f"{k}={v}" for k, v in report.user_properties)
    results = item.config._criteria.setdefault(number, [text, True, []])
    results[1] = results[1] and report.passed
    if detail:
        results[2].append(detail)


def pytest_terminal_summary(terminalreporter, config):
    criteria = getattr(config, "_criteria", {})
    if not criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(criteria):
        text, ok, details = criteria[number]
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}"
        if details:
            line += "  [" + " | ".join(details) + "]"
        terminalreporter.write_line(line)
