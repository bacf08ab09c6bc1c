"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_OUTCOMES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.failed:
        msg = str(call.excinfo.value).strip().splitlines() if call.excinfo else []
        detail = detail or (msg[0] if msg else rep.longrepr.__class__.__name__)
        _OUTCOMES[number] = (title, False, detail)
    elif rep.when == "call":
        _OUTCOMES[number] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        title, ok, detail = _OUTCOMES[number]
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
