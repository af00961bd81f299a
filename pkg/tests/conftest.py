import numpy as np
import pytest


def ginibre(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERIA, RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key, _, _ in CRITERIA:
        if key in RESULTS:
            ok, line = RESULTS[key]
            terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key} {line}")
