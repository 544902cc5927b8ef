import numpy as np
import pytest

from rrcscm.core import Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def blobs(n_per_class, centres, scale, seed):
    """Isotropic Gaussian blobs as a Dataset."""
    gen = np.random.default_rng(seed)
    centres = np.asarray(centres, float)
    x = np.vstack([c + scale * gen.standard_normal((n_per_class, centres.shape[1])) for c in centres])
    y = np.repeat(np.arange(len(centres)), n_per_class)
    return Dataset(x, y, len(centres))


ACCEPTANCE_LINES = {}


def report_criterion(number, passed, detail):
    """Record one acceptance line; printed in the terminal summary."""
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
