import numpy as np
import pytest

from cehgeom import GeometryParams
from cehgeom.tensors import random_points


@pytest.fixture
def params2():
    return GeometryParams(2, 1.0)


@pytest.fixture
def params3():
    return GeometryParams(3, 0.8)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def seeded_points(num, n, a, seed=42):
    return random_points(num, GeometryParams(n, a), seed=seed)
