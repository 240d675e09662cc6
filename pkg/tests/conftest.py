import sys

import numpy as np
import pytest

from msgpa import MSParams, TimeGrid, propagate_schrodinger
from msgpa.model import initial_state


def random_density(d, rng, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(d, rng):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def sf():
    return MSParams.strong_field()


@pytest.fixture(scope="session")
def sf_unitary_run(sf):
    grid = TimeGrid.gate_periods(sf, 3, 4096)
    return propagate_schrodinger(sf, initial_state(sf), grid)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
