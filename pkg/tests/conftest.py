import pytest

_VERDICTS = []


class Verdict:
    """Collects sub-checks of one acceptance criterion and reports them as one line."""

    def __init__(self, label):
        self.label = label
        self.checks = []

    def check(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks)

    def line(self):
        parts = [f"{n}={'ok' if ok else 'FAIL'}" + (f" ({d})" if d else "") for n, ok, d in self.checks]
        return f"{'PASS' if self.passed else 'FAIL'}  {self.label}: " + "; ".join(parts)

    def assert_all(self):
        failed = [f"{n} ({d})" for n, ok, d in self.checks if not ok]
        assert not failed, "failed checks: " + ", ".join(failed)


@pytest.fixture
def verdict(request):
    v = Verdict(request.node.get_closest_marker("criterion").args[0])
    _VERDICTS.append(v)
    return v


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for v in _VERDICTS:
        terminalreporter.write_line(v.line())
