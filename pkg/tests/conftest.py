import pytest

_acceptance: list[tuple[str, str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.name.startswith("test_criterion_") and (rep.when == "call" or rep.failed):
        doc = (item.obj.__doc__ or item.name).strip().splitlines()[0]
        if not any(name == item.name for name, _, _ in _acceptance):
            _acceptance.append((item.name, doc, "PASS" if rep.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, doc, verdict in sorted(_acceptance):
        terminalreporter.write_line(f"{verdict}  {name}: {doc}")
