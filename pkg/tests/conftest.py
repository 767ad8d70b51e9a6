"""Prints one verdict line per acceptance criterion after the test run."""

_outcomes = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or "::" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    ok = report.outcome == "passed"
    if report.when == "call":
        _outcomes[name] = _outcomes.get(name, True) and ok
    elif not ok:
        _outcomes[name] = False


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    lines = []
    for name, ok in _outcomes.items():
        words = name[len("test_criterion_"):].split("_")
        lines.append((int(words[0]), " ".join(words[1:]), ok))
    terminalreporter.write_line("")
    for num, title, ok in sorted(lines):
        terminalreporter.write_line(
            "ACCEPTANCE %d (%s): %s" % (num, title, "PASS" if ok else "FAIL"))
