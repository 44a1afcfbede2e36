import numpy as np
import pytest

from yamabelab.domain import Field, Homogeneous, Line1D, WeightedGraph


def line_field(values, volume=1.0, S=1.0, h=1.0):
    values = np.asarray(values, dtype=float)
    J = (values.shape[-1] - 1) // 2
    return Field(Homogeneous(volume, S), Line1D(J, h), values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def triangle():
    return WeightedGraph((1.0, 0.5, 1.5), (2.0, 1.0, 3.0), ((0, 1, 1.0), (1, 2, 0.5), (0, 2, 2.0)))
