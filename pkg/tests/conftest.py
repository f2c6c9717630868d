import pytest

from hamperc.rng import derive_stream

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, label = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        verdict = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        detail = getattr(item, "criterion_detail", "")
        _criteria[num] = (verdict, f"{label}{': ' + detail if detail else ''}")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        verdict, text = _criteria[num]
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {text}")


@pytest.fixture
def stream():
    return derive_stream(20260101, 0)


@pytest.fixture
def detail(request):
    """Attach a one-line measurement summary to the acceptance report."""

    def note(text: str):
        request.node.criterion_detail = text

    return note
