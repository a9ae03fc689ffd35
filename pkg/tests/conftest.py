import numpy as np
import pytest

ACCEPTANCE = pytest.StashKey[dict]()
N_CRITERIA = 8


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion.

    Tests call ``acceptance(n, title, ok, detail)`` before asserting so the
    line is emitted whether or not the assertion holds.
    """
    results = request.config.stash[ACCEPTANCE]

    def record(n, title, ok, detail=""):
        results[n] = (title, bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in range(1, N_CRITERIA + 1):
        if n in results:
            title, ok, detail = results[n]
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} {detail}")
        else:
            terminalreporter.write_line(f"FAIL criterion {n}: not run or errored before recording")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
