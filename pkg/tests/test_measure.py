import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avgrecon.errors import AtomOutOfCube, MixedWidths, WeightsNotProbability
from avgrecon.measure import (
    SamplingMeasure,
    exp_transform,
    make_measure,
    measure_constants,
    tensor_measure,
)

from conftest import HALF_PI


def test_point_mass_transform_is_one(point_mass):
    for xi in (0.0, 1.3, -7.0, 100.0):
        assert exp_transform(point_mass, [xi]) == 1


def test_symmetric_pair_value(pair_1d):
    expected = float(mpmath.cos(mpmath.mpf("0.05") * mpmath.pi))
    assert exp_transform(pair_1d, [math.pi]) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.987688, abs=1e-6)


def test_atom_outside_cube_rejected():
    with pytest.raises(AtomOutOfCube):
        make_measure(1, 0.1, [0.06], [1.0])


def test_boundary_atoms_allowed():
    m = make_measure(1, 0.1, [-0.05, 0.05], [0.5, 0.5])
    assert m.n_atoms == 2


@pytest.mark.parametrize("weights", [[0.5, 0.6], [1.2, -0.2], [1.0, 0.0]])
def test_bad_weights_rejected(weights):
    with pytest.raises(WeightsNotProbability):
        make_measure(1, 0.1, [-0.01, 0.01], weights)


def test_small_weight_drift_renormalized():
    m = make_measure(1, 0.1, [-0.01, 0.01], [0.5, 0.5 + 5e-10])
    assert math.fsum(m.weights) == pytest.approx(1.0, abs=1e-15)


def test_tensor_of_pairs(pair_1d):
    m = tensor_measure([pair_1d, pair_1d])
    assert m.dim == 2 and m.n_atoms == 4
    np.testing.assert_allclose(m.weights, 0.25)
    assert m.separated == (pair_1d, pair_1d)


def test_single_factor_tensor(pair_1d):
    m = tensor_measure([pair_1d])
    assert m.dim == 1 and m.separated == (pair_1d,)
    np.testing.assert_array_equal(m.atoms, pair_1d.atoms)


def test_mixed_widths():
    a = make_measure(1, 0.1, [0.0], [1.0])
    b = make_measure(1, 0.2, [0.0], [1.0])
    with pytest.raises(MixedWidths):
        tensor_measure([a, b])


def test_constants_examples():
    m2 = make_measure(2, 0.05, [[0.0, 0.0]], [1.0])
    c = measure_constants(m2, HALF_PI)
    expected = float(mpmath.cos((2 * mpmath.pi - mpmath.pi / 2) * mpmath.mpf("0.05") * 2 / 2))
    assert c.gamma == pytest.approx(expected, abs=1e-15)
    assert c.gamma == pytest.approx(0.97237, abs=1e-5)
    assert c.width_condition_general

    m1 = make_measure(1, 0.1, [0.0], [1.0])
    c1 = measure_constants(m1, HALF_PI)
    expected = float(mpmath.cos((2 * mpmath.pi - mpmath.pi / 2) * mpmath.mpf("0.1") / 2))
    assert c1.gamma_tilde == pytest.approx(expected, abs=1e-15)
    assert c1.width_condition_separated

    m3 = make_measure(3, 0.5, [[0.0, 0.0, 0.0]], [1.0])
    assert not measure_constants(m3, HALF_PI).width_condition_general


def test_serialization_round_trip(tensor_2d, three_atom_2d):
    for m in (tensor_2d, three_atom_2d):
        back = SamplingMeasure.from_dict(m.to_dict())
        np.testing.assert_array_equal(back.atoms, m.atoms)
        np.testing.assert_array_equal(back.weights, m.weights)
        assert (back.separated is None) == (m.separated is None)


coords = st.floats(-0.05, 0.05, allow_nan=False)


@st.composite
def measures(draw, dim=None):
    dim = dim or draw(st.integers(1, 3))
    n = draw(st.integers(1, 5))
    atoms = [[draw(coords) for _ in range(dim)] for _ in range(n)]
    raw = [draw(st.floats(0.05, 1.0)) for _ in range(n)]
    total = math.fsum(raw)
    return make_measure(dim, 0.1, atoms, [w / total for w in raw])


freqs = st.floats(-40, 40, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(m=measures(), data=st.data())
def test_transform_properties(m, data):
    xi = np.array([data.draw(freqs) for _ in range(m.dim)])
    u = exp_transform(m, xi)
    assert abs(u) <= 1 + 1e-15
    assert exp_transform(m, np.zeros(m.dim)) == pytest.approx(1, abs=1e-15)
    assert exp_transform(m, -xi) == pytest.approx(np.conj(u), abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(m=measures(), data=st.data())
def test_real_part_above_gamma(m, data):
    delta = data.draw(st.floats(0.3, 3.0))
    c = measure_constants(m, delta)
    if not c.width_condition_general:
        return
    lim = 2 * math.pi - delta
    grid = np.linspace(-lim, lim, 9)
    pts = np.stack(np.meshgrid(*([grid] * m.dim), indexing="ij"), -1).reshape(-1, m.dim)
    assert np.min(exp_transform(m, pts).real) >= c.gamma - 1e-14
    assert c.gamma <= c.gamma_tilde


@settings(max_examples=30, deadline=None)
@given(m=measures(dim=2), data=st.data())
def test_symmetrized_measure_is_real(m, data):
    sym = make_measure(2, 0.1, np.vstack([m.atoms, -m.atoms]), np.concatenate([m.weights, m.weights]) / 2)
    xi = np.array([data.draw(freqs), data.draw(freqs)])
    assert abs(exp_transform(sym, xi).imag) <= 1e-14


@settings(max_examples=30, deadline=None)
@given(a=measures(dim=1), b=measures(dim=1), data=st.data())
def test_tensor_transform_factors(a, b, data):
    m = tensor_measure([a, b])
    xi = np.array([data.draw(freqs), data.draw(freqs)])
    assert exp_transform(m, xi) == pytest.approx(exp_transform(a, xi[:1]) * exp_transform(b, xi[1:]), abs=1e-13)
