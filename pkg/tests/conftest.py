"""Shared fixtures: the paper-configuration basis, packet, and matrices.

Building the eigenbasis and the operator matrices dominates test runtime,
so both are session scoped and shared across modules.
"""

import numpy as np
import pytest

from qbouncer import (
    PAPER_UNITS,
    EvolutionMatrices,
    PacketSpec,
    bouncer_basis,
    project,
)

PAPER_NMAX = 70
PAPER_SPEC = PacketSpec(z0=25.0, dz0=1.0, p0=0.0)


@pytest.fixture(scope="session")
def units():
    return PAPER_UNITS


@pytest.fixture(scope="session")
def paper_spec():
    return PAPER_SPEC


@pytest.fixture(scope="session")
def paper_basis():
    return bouncer_basis(PAPER_UNITS, PAPER_NMAX)


@pytest.fixture(scope="session")
def paper_cs(paper_basis):
    return project(PAPER_SPEC, paper_basis, tol=1e-6)


@pytest.fixture(scope="session")
def paper_mats(paper_basis, paper_cs):
    return EvolutionMatrices(paper_basis, n_states=paper_cs.n_states)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20010425)
