import sys


def pytest_terminal_summary(terminalreporter):
    # replay acceptance verdicts after capture ends; fd-level capture
    # swallows even sys.__stdout__ while the tests run
    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None) if mod else None
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
