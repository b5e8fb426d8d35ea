import numpy as np
import pytest

from polyrigid import mesh


@pytest.fixture
def tet():
    return mesh.tetrahedron()


@pytest.fixture
def octa():
    return mesh.octahedron()


@pytest.fixture
def ico():
    return mesh.icosahedron()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
