import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line; it is echoed in the terminal summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(number, ok, text):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {text}"
        print(line)
        lines.append((number, line))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
