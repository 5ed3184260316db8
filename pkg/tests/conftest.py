import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def brute_partial_sums(v, n=None):
    """Partial sums by explicit sorting and a python loop."""
    vals = sorted((float(x) for x in v), reverse=True)
    if n is not None:
        vals = vals + [0.0] * (n - len(vals))
    out, acc = [], 0.0
    for x in vals:
        acc += x
        out.append(acc)
    return np.array(out)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, elapsed: float, limit: float, detail: str) -> bool:
    ok = ok and elapsed < limit
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES[number] = f"criterion {number}: {status}  {detail}  ({elapsed:.2f}s, limit {limit:g}s)"
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
