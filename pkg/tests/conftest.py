import numpy as np
import pytest

from curved_nbody.dynamics import SystemState


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sphere_point(theta, phi):
    """Unit-sphere point from polar angle ``theta`` and longitude ``phi``."""
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def hyperboloid_point(s, phi):
    """Unit-hyperboloid point at distance ``s`` from the vertex, longitude ``phi``."""
    return np.array([np.sinh(s) * np.cos(phi), np.sinh(s) * np.sin(phi), np.cosh(s)])


@pytest.fixture
def three_body_s2():
    q = [sphere_point(1.0, 0.0), sphere_point(1.3, 2.0), sphere_point(0.6, 4.1)]
    v = [[0.0, 0.3, 0.0], [0.2, -0.1, 0.1], [-0.1, 0.0, 0.2]]
    return SystemState.from_arrays(1.0, [0.3, 0.2, 0.4], q, v)


@pytest.fixture
def three_body_h2():
    q = [hyperboloid_point(0.4, 0.0), hyperboloid_point(0.7, 2.0), hyperboloid_point(0.5, 4.1)]
    v = [[0.0, 0.3, 0.0], [0.2, -0.1, 0.1], [-0.1, 0.0, 0.2]]
    return SystemState.from_arrays(-1.0, [1.0, 0.7, 1.3], q, v)
