import numpy as np
import pytest

from espframe import EspFrame, exponential_set, gaussian_set, parseval_normalize

# Verdict lines collected by the acceptance suite, re-emitted after the
# normal test summary so they survive pytest's stdout capture.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20260818)


@pytest.fixture(scope="session")
def small_frame():
    """Parseval exponential frame, n=64, L=3, 1 kHz."""
    env = parseval_normalize(exponential_set(64, 1000.0, [0.004, 0.016, 0.064]))
    frame = EspFrame(env)
    frame.fit()
    return frame


@pytest.fixture(scope="session")
def gaussian_frame():
    """Parseval gaussian frame, n=50, L=2."""
    env = parseval_normalize(gaussian_set(50, 1000.0, [0.003, 0.012]))
    frame = EspFrame(env)
    frame.fit()
    return frame


def random_signal(rng, n, complex_valued=True, dtype=np.complex128):
    x = rng.standard_normal(n)
    if complex_valued:
        x = x + 1j * rng.standard_normal(n)
    return np.asarray(x, dtype=dtype)
