"""Closed-form mode references checked against independent integrations.

The closed forms come from the characteristic roots of the constant
coefficient mode ODE; the independent oracle is adaptive high-order shooting
(which is also the production path for the variable-coefficient slab), plus
banded finite-difference Green columns at the lowest resolutions.
"""

import numpy as np
import pytest

from calwick import elliptic, reference
from calwick.errors import NotStationary
from calwick.reference import _half_shoot_derivative
from calwick.modes import ModeReduction

from conftest import make_family


def test_slab_log_derivative_closed_form_vs_shooting(twisted_fam):
    # the shooting integrator knows nothing about the characteristic roots
    L = 2.0
    for nu in (0.0, 1.0, 3.0):
        ref = reference.mode_reference(twisted_fam, nu, "dirichlet", L)
        red = ModeReduction(twisted_fam)
        duR = _half_shoot_derivative(red, nu, L)
        duL = _half_shoot_derivative(red, nu, -L)
        assert abs(duR - ref.duR0) < 1e-10 * (1.0 + abs(ref.duR0))
        assert abs(duL - ref.duL0) < 1e-10 * (1.0 + abs(ref.duL0))


def test_periodic_profile_normalization(flat_fam):
    beta = 2.0
    ref = reference.mode_reference(flat_fam, 1.0, "periodic", beta)
    Acf, Bcf = ref._periodic_coeffs()
    a, w = ref.a, ref.omega_p
    # wrapped profile equals 1 at both seam sides
    assert Acf + Bcf == pytest.approx(1.0)
    val_beta = Acf * np.exp((a + w) * beta) + Bcf * np.exp((a - w) * beta)
    assert val_beta == pytest.approx(1.0)


def test_green_kernel_against_grid_solve(flat_fam):
    # FD Green column at two resolutions brackets the closed form at order 2
    L = 2.0
    nu = 1.0
    ref = reference.mode_reference(flat_fam, nu, "dirichlet", L)
    errs = []
    for n_s in (201, 401):
        sysm = elliptic.assemble_K(flat_fam, nu, "dirichlet", L, n_s)
        j2 = np.argmin(np.abs(sysm.s_grid - 0.5))
        s2 = sysm.s_grid[j2]
        col = elliptic.solve(sysm, elliptic.delta_rhs(sysm, j2))
        worst = 0.0
        for s1 in (-1.2, -0.3, 0.9, 1.5):
            j1 = np.argmin(np.abs(sysm.s_grid - s1))
            worst = max(worst, abs(col[j1] - ref.green(sysm.s_grid[j1], s2)))
        errs.append(worst)
    assert errs[1] < errs[0] / 3.0
    assert errs[1] < 2e-4


def test_green_kernel_periodic_wraps(flat_fam):
    beta = 2.0
    ref = reference.mode_reference(flat_fam, 2.0, "periodic", beta)
    # kernel depends on (s1 - s2) mod beta only
    assert ref.green(0.3, 0.1) == pytest.approx(ref.green(0.3 - beta, 0.1))
    assert ref.green(0.3, 0.1) == pytest.approx(ref.green(0.9, 0.7))


def test_green_requires_stationary(frw_fam):
    ref = reference.mode_reference(frw_fam, 1.0, "dirichlet", 1.0)
    assert ref.omega_p is None
    with pytest.raises(NotStationary):
        ref.green(0.2, 0.1)


def test_reference_complementarity_and_reflection(twisted_fam, frw_fam):
    cases = [
        (twisted_fam, "dirichlet", 2.0),
        (twisted_fam, "periodic", 2.0),
        (frw_fam, "dirichlet", 1.0),
    ]
    for fam, bc, extent in cases:
        if bc == "periodic" and not fam.is_stationary():
            continue
        for nu in (0.0, 1.0, 4.0):
            ref = reference.mode_reference(fam, nu, bc, extent)
            Cp = reference.calderon_matrix(ref, +1)
            Cm = reference.calderon_matrix(ref, -1)
            tol = 1e-12 if fam.is_stationary() else 1e-10
            assert np.max(np.abs(Cp + Cm - np.eye(2))) < tol
            refl = reference.reflection_matrix(ref)
            q = np.array([[0.0, 1.0], [1.0, 0.0]])
            assert np.max(np.abs(Cp @ q - refl)) < tol


def test_frw_shooting_is_tolerance_converged(frw_fam):
    red = ModeReduction(frw_fam)
    tight = _half_shoot_derivative(red, 2.0, 1.0, rtol=1e-13)
    loose = _half_shoot_derivative(red, 2.0, 1.0, rtol=1e-9)
    assert abs(tight - loose) < 1e-7 * abs(tight)
