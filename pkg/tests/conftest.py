import numpy as np
import pytest

from hpimc.grid import kelvin_to_beta, make_grid, wavenumber_to_hartree
from hpimc.hamiltonian import DoubleWell, System

FIG1_MASS = 1836.0
FIG1_LENGTH = 30.0


def fig1_potential():
    return DoubleWell(FIG1_MASS, wavenumber_to_hartree(500.0), wavenumber_to_hartree(1500.0))


def fig1_system(n_qubits):
    return System(make_grid(FIG1_LENGTH, n_qubits), fig1_potential(), FIG1_MASS)


FIG1_BETA = kelvin_to_beta(350.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion number -> PASS/FAIL line, filled by test_acceptance
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
