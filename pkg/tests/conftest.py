import numpy as np
import pytest

from surfspec import geometry


@pytest.fixture(scope="session")
def sphere1():
    return geometry.make_sphere(1)


@pytest.fixture(scope="session")
def sphere2():
    return geometry.make_sphere(2)


@pytest.fixture(scope="session")
def sphere3():
    return geometry.make_sphere(3)


@pytest.fixture(scope="session")
def cube():
    return geometry.make_cube()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
