import math

import numpy as np
import pytest

from ptqsd.discriminate import design_cpt_orthogonal
from ptqsd.ptcore import FamilyParams, state_family

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def family(epsilon, gamma=0.0, delta=0.0):
    return state_family(FamilyParams(epsilon, gamma, delta))


def designed(epsilon, gamma=0.0, delta=0.0):
    """Family states plus the Hamiltonian making psi1 and psi2 CPT-orthogonal."""
    states = family(epsilon, gamma, delta)
    return states, design_cpt_orthogonal(states.psi1, states.psi2)


def theta1(epsilon):
    return (math.pi - 2 * epsilon) / 4


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
