_acceptance: list[tuple[str, str, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "budget(seconds): wall-clock limit for an acceptance check")


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1].removeprefix("test_").replace("_", " ")
        _acceptance.append((name, "PASS" if report.passed else "FAIL", report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance")
    for name, verdict, seconds in _acceptance:
        terminalreporter.write_line(f"{verdict} {name} ({seconds:.2f}s)")
