"""Collects the acceptance verdicts and prints them at the end of the session."""

ACCEPTANCE = []


def record(number, title, ok, detail=""):
    ACCEPTANCE.append((number, title, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} | {detail}")
