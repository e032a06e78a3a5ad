import math

import pytest

from avgrecon.measure import make_measure, tensor_measure

HALF_PI = math.pi / 2


@pytest.fixture
def point_mass():
    return make_measure(1, 0.1, [0.0], [1.0])


@pytest.fixture
def pair_1d():
    return make_measure(1, 0.1, [-0.05, 0.05], [0.5, 0.5])


@pytest.fixture
def three_atom_2d():
    return make_measure(2, 0.05, [[0.0, 0.0], [0.02, -0.015], [-0.025, 0.025]], [0.5, 0.3, 0.2])


@pytest.fixture
def tensor_2d():
    a = make_measure(1, 0.1, [-0.05, 0.05], [0.5, 0.5])
    b = make_measure(1, 0.1, [-0.03, 0.0, 0.04], [0.25, 0.5, 0.25])
    return tensor_measure([a, b])
