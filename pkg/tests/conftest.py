import pytest


def pytest_configure(config):
    config._acceptance_lines = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test still asserts on its own."""
    def record(number, ok, detail):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {number:>2}: {status}  {detail}"
        request.config._acceptance_lines[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
