import numpy as np
import pytest

from symcov.sampling import random_spd

_ACCEPTANCE = []


@pytest.fixture
def report_criterion():
    """Record a one-line PASS/FAIL verdict for the terminal summary."""

    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def spd_pair():
    return random_spd(6, 1), random_spd(6, 2)
