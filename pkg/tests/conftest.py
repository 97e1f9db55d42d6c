import pytest

_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config.addinivalue_line("markers", "slow: runs for more than a few seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        state = "xfailed" if hasattr(rep, "wasxfail") else rep.outcome
        _outcomes.setdefault(mark.args[0], []).append((item.name, state))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        runs = _outcomes[n]
        bad = [name for name, state in runs if state != "passed"]
        verdict = "PASS" if not bad else "FAIL"
        extra = f" (not met: {', '.join(bad)})" if bad else ""
        terminalreporter.write_line(f"criterion {n}: {verdict} [{len(runs) - len(bad)}/{len(runs)} checks]{extra}")
