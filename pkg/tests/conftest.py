from __future__ import annotations

import pytest

_RESULTS: list[tuple[str, str, str]] = []


@pytest.fixture
def report(request):
    """Attach a one-line detail to an acceptance test's pass/fail line."""
    holder = {"detail": ""}
    request.node.acceptance_detail = holder
    return holder


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    holder = getattr(item, "acceptance_detail", None)
    if holder is not None and rep.when == "call":
        _RESULTS.append((item.name, "PASS" if rep.passed else "FAIL", holder["detail"]))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in _RESULTS:
        terminalreporter.write_line(f"{status}  {name}  {detail}")
