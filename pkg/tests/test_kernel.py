import math

import numpy as np
import pytest

from avgrecon.errors import ModeUnavailable, WidthConditionViolated
from avgrecon.kernel import (
    ReconstructionKernel,
    build_kernel_table,
    phi_hat,
    phi_value,
    verify_complete_reconstruction,
)
from avgrecon.measure import exp_transform, make_measure, tensor_measure
from avgrecon.reconstruct import probe_axis
from avgrecon.window import eval_window, make_window

from conftest import HALF_PI


def sinc_kernel(point_mass):
    # indicator of [-pi, pi] in place of the window: Phi(x) = sqrt(2/pi) sin(pi x) / x
    window = make_window(1, HALF_PI, "separated")
    return ReconstructionKernel(
        point_mass,
        window,
        "separated",
        profile=lambda s: (np.abs(s) <= math.pi).astype(float),
        extra_splits=(-math.pi, math.pi),
    )


def test_point_mass_phi_hat_is_window(point_mass):
    w = make_window(3, HALF_PI, "separated")
    kern = ReconstructionKernel(point_mass, w, "separated")
    s = np.linspace(-5, 5, 101)
    np.testing.assert_allclose(phi_hat(kern, s[:, None]), eval_window(w, s[:, None]), atol=1e-15)


@pytest.mark.parametrize("mode,k", [("separated", 3), ("general", 2)])
def test_plateau_inverse(tensor_2d, mode, k):
    kern = ReconstructionKernel(tensor_2d, make_window(k, HALF_PI, mode, 2), mode)
    xi = np.random.default_rng(1).uniform(-HALF_PI, HALF_PI, (300, 2))
    np.testing.assert_allclose(kern.phi_hat(xi) * kern.transform(xi), 1, atol=1e-12)


def test_zero_outside_support(pair_1d):
    kern = ReconstructionKernel(pair_1d, make_window(2, HALF_PI, "separated"), "separated")
    xi = np.array([[4.72], [-5.0], [9.0]])
    np.testing.assert_array_equal(kern.phi_hat(xi), 0)


def test_phi_at_origin_positive(point_mass):
    w = make_window(2, HALF_PI, "separated")
    kern = ReconstructionKernel(point_mass, w, "separated")
    r = kern.rule(0.0)
    integral = float(np.sum(r.weights * kern.window_1d(r.nodes)))
    assert phi_value(kern, [0.0]) == pytest.approx(integral / math.sqrt(2 * math.pi), abs=1e-13)
    assert phi_value(kern, [0.0]) > 0


def test_sinc_closed_form(point_mass):
    kern = sinc_kernel(point_mass)
    x = np.array([0.25, 0.5, 1.3, 7.7, 19.1])
    want = math.sqrt(2 / math.pi) * np.sin(math.pi * x) / x
    np.testing.assert_allclose(kern.values(x[:, None]), want, atol=1e-12)


def test_sinc_reproduces_kronecker(point_mass):
    kern = sinc_kernel(point_mass)
    m = np.arange(-20, 21, dtype=float)
    got = kern.values(m[:, None]) / math.sqrt(2 * math.pi)
    np.testing.assert_allclose(got, (m == 0).astype(float), atol=1e-8)


@pytest.mark.parametrize("mode,k", [("separated", 4), ("general", 2)])
def test_symmetric_measure_gives_even_kernel(pair_1d, mode, k):
    sym = tensor_measure([pair_1d, make_measure(1, 0.1, [-0.04, 0.0, 0.04], [0.25, 0.5, 0.25])])
    kern = ReconstructionKernel(sym, make_window(k, HALF_PI, mode, 2), mode)
    x = np.random.default_rng(2).uniform(-6, 6, (20, 2))
    np.testing.assert_allclose(kern.values(x), kern.values(-x), atol=2e-9)


def test_conjugate_symmetry(three_atom_2d):
    kern = ReconstructionKernel(three_atom_2d, make_window(2, HALF_PI, "general", 2), "general")
    xi = np.random.default_rng(3).uniform(-4.7, 4.7, (200, 2))
    np.testing.assert_allclose(kern.phi_hat(-xi), np.conj(kern.phi_hat(xi)), atol=1e-15)


@pytest.mark.parametrize("x", [0.0, 0.3, 0.77])
def test_bessel_bound_1d(pair_1d, x):
    kern = ReconstructionKernel(pair_1d, make_window(3, HALF_PI, "separated"), "separated")
    norm_sq = kern.phi_l2_norm_sq()
    js = np.arange(-40, 41, dtype=float)
    vals = kern.values((x - js)[:, None])
    for N in (1, 5, 20, 40):
        part = math.fsum(vals[np.abs(js) <= N] ** 2)
        assert part <= 2 * norm_sq


def test_bessel_bound_2d(three_atom_2d):
    kern = ReconstructionKernel(three_atom_2d, make_window(1, HALF_PI, "general", 2), "general")
    norm_sq = kern.phi_l2_norm_sq()
    js = np.arange(-8, 9, dtype=float)
    x = np.array([0.4, 0.6])
    vals = kern.grid([x[0] - js, x[1] - js])
    assert math.fsum(vals.ravel() ** 2) <= 4 * norm_sq


def test_decay_trend(pair_1d):
    kern = ReconstructionKernel(pair_1d, make_window(3, HALF_PI, "separated"), "separated")
    j = np.array([2.0, 4.0, 8.0, 16.0, 32.0])
    vals = np.abs(kern.values((0.5 - j)[:, None]))
    assert np.all(np.diff(vals) < 0)
    assert vals[-1] < 1e-3 * vals[0]


def test_table_empty_and_repeated(pair_1d):
    kern = ReconstructionKernel(pair_1d, make_window(2, HALF_PI, "separated"), "separated")
    assert build_kernel_table(kern, []) == {}
    table = build_kernel_table(kern, [[0.5], [0.5], [0.5]])
    assert list(table) == [(0.5,)]


def test_table_counts_and_mode_agreement(tensor_2d):
    axis = probe_axis(9)
    js = np.arange(-5, 6, dtype=float)
    pts = np.stack(np.meshgrid(axis, axis, indexing="ij"), -1).reshape(-1, 2)
    jj = np.stack(np.meshgrid(js, js, indexing="ij"), -1).reshape(-1, 2)
    offsets = (pts[:, None, :] - jj[None, :, :]).reshape(-1, 2)

    # the general window of order k and the separated window of order 2k share the power 2k
    gen = ReconstructionKernel(tensor_2d, make_window(1, HALF_PI, "general", 2), "general")
    sep = ReconstructionKernel(tensor_2d, make_window(2, HALF_PI, "separated", 2), "separated")
    gtab = build_kernel_table(gen, offsets)
    stab = build_kernel_table(sep, offsets)
    assert len(gtab) == 81 * 121
    assert [len(c) for c in sep.axis_cache] == [99, 99]
    keys = list(gtab)
    np.testing.assert_allclose([stab[k] for k in keys], [gtab[k] for k in keys], atol=1e-8)


def test_table_values_independent_of_batch(pair_1d):
    w = make_window(3, HALF_PI, "separated")
    a = ReconstructionKernel(pair_1d, w, "separated")
    b = ReconstructionKernel(pair_1d, w, "separated")
    a.values([[0.3]])
    b.values(np.array([[0.3], [50.2], [-11.0]]))
    assert a.cache[(0.3,)] == b.cache[(0.3,)]


def test_completeness_point_mass(point_mass):
    kern = ReconstructionKernel(point_mass, make_window(5, HALF_PI, "separated"), "separated")
    rep = verify_complete_reconstruction(kern)
    assert rep.max_deviation <= 1e-15
    assert rep.passed and rep.probe_count == 200


def test_completeness_general(three_atom_2d):
    kern = ReconstructionKernel(three_atom_2d, make_window(3, HALF_PI, "general", 2), "general")
    assert verify_complete_reconstruction(kern).passed


def test_corrupted_normalization_is_reported(pair_1d):
    w = make_window(3, HALF_PI, "separated")
    kern = ReconstructionKernel(pair_1d, w.with_norm_const(1.01 * w.norm_const), "separated")
    rep = verify_complete_reconstruction(kern)
    assert rep.max_deviation == pytest.approx(0.01, abs=1e-9)
    assert not rep.passed


def test_width_condition(point_mass):
    wide = make_measure(2, 0.4, [[0.0, 0.0]], [1.0])
    with pytest.raises(WidthConditionViolated):
        ReconstructionKernel(wide, make_window(1, HALF_PI, "general", 2), "general")


def test_separated_needs_tensor(three_atom_2d):
    with pytest.raises(ModeUnavailable):
        ReconstructionKernel(three_atom_2d, make_window(2, HALF_PI, "separated", 2), "separated")


def test_transform_matches_measure(three_atom_2d):
    kern = ReconstructionKernel(three_atom_2d, make_window(1, HALF_PI, "general", 2), "general")
    xi = np.array([[0.3, -1.2], [2.0, 0.1]])
    np.testing.assert_allclose(kern.transform(xi), exp_transform(three_atom_2d, xi), atol=1e-16)
