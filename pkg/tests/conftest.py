import numpy as np
import pytest

from halfspace_ns import PhysicalParams, flat_shape, gaussian_bump_shape, make_grid


@pytest.fixture(scope="session")
def params():
    """Canonical supersonic configuration used throughout."""
    return PhysicalParams(K=1.0, gamma=1.0, mu1=1.0, mu2=0.0,
                          rho_plus=1.0, u_plus=-2.0, u_tilde_b=-3.0)


@pytest.fixture(scope="session")
def flat2d():
    return flat_shape(dim=2, extent=(8.0,))


@pytest.fixture(scope="session")
def bump2d():
    return gaussian_bump_shape(dim=2, amplitude=0.3, width=1.0, extent=(8.0,))


@pytest.fixture(scope="session")
def grid_flat(flat2d):
    return make_grid(flat2d, (48, 24), 23.0)


@pytest.fixture(scope="session")
def grid_bump(bump2d):
    return make_grid(bump2d, (48, 24), 23.0)


def measured_order(errors, ratio=2.0):
    e = np.asarray(errors, dtype=float)
    return np.log(e[:-1] / e[1:]) / np.log(ratio)
