"""Euclidean kernel extraction, two-time continuation, harmonic strips."""

import numpy as np
import pytest

from calwick import elliptic, lorentzian, reference, twopoint, wick
from calwick.errors import (
    BoundaryMismatch,
    CoincidentPoints,
    NonConvergent,
    NotStationary,
)

from conftest import make_family


def _thermal_lam(fam, nu, beta=2.0, n_t=401):
    om = lorentzian.lorentzian_frequency(fam, nu)
    k = max(1, round(om * 2.0 / np.pi))
    T = np.pi * k / om
    evo = lorentzian.evolve_modes(fam, nu, T, n_t)
    ref = reference.mode_reference(fam, nu, "periodic", beta)
    lam = twopoint.assemble_two_point(reference.calderon_matrix(ref, +1), evo, +1)
    return lam, ref


def test_euclidean_extract_matches_reference(flat_fam):
    nu = 1.0
    ref = reference.mode_reference(flat_fam, nu, "dirichlet", 2.0)
    sysm = elliptic.assemble_K(flat_fam, nu, "dirichlet", 2.0, 801)
    for j1, j2 in ((500, 430), (300, 520)):
        s1, s2 = sysm.s_grid[j1], sysm.s_grid[j2]
        val = wick.euclidean_kernel_extract(sysm, s1, s2)
        assert abs(val - ref.green(s1, s2)) < 5e-5


def test_coincident_points_rejected(flat_fam):
    sysm = elliptic.assemble_K(flat_fam, 1.0, "dirichlet", 2.0, 101)
    s = sysm.s_grid[60]
    with pytest.raises(CoincidentPoints):
        wick.euclidean_kernel_extract(sysm, s, s)


def test_cone_validation():
    with pytest.raises(ValueError):
        wick.ContinuationCone(+1, ((0.1, 0.1),))      # s2 on the wrong side
    with pytest.raises(ValueError):
        wick.ContinuationCone(+1, ((0.1, -1.0),))     # aspect outside [1/4, 4]
    cone = wick.make_cone()
    for s1, s2 in cone.pairs:
        assert s1 > 0 > s2
        assert 0.25 <= abs(s2) / s1 <= 4.0


def test_two_time_continuation_thermal(flat_fam):
    lam, ref = _thermal_lam(flat_fam, 1.0)
    rep = wick.two_time_continuation_check(lam, ref, wick.make_cone())
    assert rep.euclid_max < 1e-12
    assert rep.cone_linear(), f"cone rate {rep.cone_rate}"
    assert abs(rep.cone_rate - 1.0) < 0.2


def test_two_time_needs_stationary(frw_fam):
    evo = lorentzian.evolve_modes(frw_fam, 1.0, 1.0, 201, integrator="rk4")
    lam = twopoint.assemble_two_point(np.eye(2, dtype=complex), evo, +1)
    ref = reference.mode_reference(frw_fam, 1.0, "dirichlet", 1.0)
    with pytest.raises(NotStationary):
        wick.two_time_continuation_check(lam, ref, wick.make_cone())


def test_strip_two_row_solve_is_exact(flat_fam):
    # single temporal frequency: interior must be the sinh interpolant
    beta = 2.0
    n_t = 128
    T = np.pi
    t = np.linspace(-T, T, n_t, endpoint=False)
    nu_t = 2.0
    top = np.exp(1j * nu_t * t)
    bottom = np.exp(1j * nu_t * t) * 0.3
    strip = wick.harmonic_strip_continuation(top, bottom, t, beta, 401)
    s = strip.s_grid[137]
    expect = (
        np.sinh(nu_t * (beta - s)) / np.sinh(nu_t * beta)
        + 0.3 * np.sinh(nu_t * s) / np.sinh(nu_t * beta)
    ) * top
    assert np.max(np.abs(strip.values[137] - expect)) < 1e-12
    assert strip.harmonicity_residual() < 1e-9
    assert np.max(np.abs(strip.values[0] - top)) < 1e-13
    assert np.max(np.abs(strip.values[-1] - bottom)) < 1e-13


def test_strip_rejects_mismatched_rows():
    t = np.linspace(0.0, 1.0, 64, endpoint=False)
    with pytest.raises(BoundaryMismatch):
        wick.harmonic_strip_continuation(np.zeros(32), np.zeros(64), t, 2.0, 33)


def test_march_exact_continues_single_frequency():
    beta = 1.5
    n_t = 256
    t = np.linspace(-np.pi, np.pi, n_t, endpoint=False)
    nu_t = 3.0
    top = np.exp(1j * nu_t * t)
    strip = wick.harmonic_strip_march(top, t, beta, 61, method="exact")
    # e^{i nu (t + i s)} = e^{-nu s} e^{i nu t}
    assert np.max(np.abs(strip.values[-1] - np.exp(-nu_t * beta) * top)) < 1e-12


def test_march_fd2_second_order():
    beta = 1.0
    n_t = 256
    t = np.linspace(-np.pi, np.pi, n_t, endpoint=False)
    top = np.exp(-1j * t) + 0.5 * np.exp(2j * t)
    exact = wick.harmonic_strip_march(top, t, beta, 41, method="exact").values[-1]
    errs = []
    for n_s in (51, 101, 201):
        got = wick.harmonic_strip_march(top, t, beta, n_s, method="fd2").values[-1]
        errs.append(np.max(np.abs(got - exact)))
    orders = [np.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) > 1.9


def test_march_guards_against_leakage():
    rng = np.random.default_rng(1)
    t = np.linspace(-np.pi, np.pi, 256, endpoint=False)
    noisy = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    with pytest.raises(NonConvergent):
        wick.harmonic_strip_march(noisy, t, 2.0, 41)


def test_boundary_value_extrapolation_consistent():
    beta = 2.0
    t = np.linspace(-np.pi, np.pi, 128, endpoint=False)
    top = np.exp(1j * t) + 0.25 * np.exp(-2j * t)
    bottom = 0.5 * np.exp(1j * t)
    strip = wick.harmonic_strip_continuation(top, bottom, t, beta, 201)
    row, est = wick.boundary_value_extrapolation(strip, target="top")
    assert np.max(np.abs(row - top)) < 1e-6
    row, est = wick.boundary_value_extrapolation(strip, target="bottom")
    assert np.max(np.abs(row - bottom)) < 1e-6
    assert est < 1e-4
