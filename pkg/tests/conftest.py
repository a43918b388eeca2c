import pytest

_DETAILS = {}
_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion")


@pytest.fixture
def measured(request):
    """Attach a one-line measurement to the acceptance summary."""

    def note(text):
        _DETAILS[request.node.nodeid] = text

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and report.when == "call":
        number, label = marker.args
        _RESULTS.append((number, label, report.passed, _DETAILS.get(item.nodeid, "")))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, label, passed, detail in sorted(_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {status}  {label}  [{detail}]")
