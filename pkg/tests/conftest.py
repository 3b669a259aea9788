"""Shared fixtures: one standard space/basis pair reused across modules."""

import numpy as np
import pytest

from heatframe import JacobiParams, build_basis, make_jacobi_space


@pytest.fixture(scope="session")
def legendre_space():
    """64-node space for the flat weight (gamma = alpha = 0)."""
    return make_jacobi_space(0.0, 0.0, 64)


@pytest.fixture(scope="session")
def legendre_basis(legendre_space):
    """Degree-40 orthonormal basis on the 64-node flat-weight space."""
    return build_basis(legendre_space, JacobiParams(0.0, 0.0), 40)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
