import pytest

RESULTS = []


def record(number, title, passed, detail, elapsed):
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'} {elapsed:7.2f}s  {title}: {detail}"
    RESULTS.append((number, line))
    print(line)


@pytest.fixture
def criterion():
    return record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(RESULTS):
        terminalreporter.write_line(line)
