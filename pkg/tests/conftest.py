from hypothesis import HealthCheck, settings

settings.register_profile("clab", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("clab")

ACCEPTANCE = []


def record_criterion(number, title, passed, detail):
    """One pass/fail line per acceptance criterion, printed at the end of
    the run (and immediately, for ``-s``)."""
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} ({detail})"
    ACCEPTANCE.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
