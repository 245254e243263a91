"""Calderon operators: grid path vs reference path, structural identities,
half-region Green and cutoff identities.
"""

import numpy as np
import pytest

from calwick import calderon, elliptic, reference
from calwick.cli import _bump, _smooth_field
from calwick.errors import CutoffViolation

from conftest import make_family


def _orders(errs):
    return [np.log2(a / b) for a, b in zip(errs, errs[1:])]


def test_grid_calderon_converges_to_reference(flat_fam):
    nu = 1.0
    ref = reference.mode_reference(flat_fam, nu, "dirichlet", 2.0)
    Cp_ref = reference.calderon_matrix(ref, +1)
    errs = []
    for n_s in (101, 201, 401):
        sysm = elliptic.assemble_K(flat_fam, nu, "dirichlet", 2.0, n_s)
        Cp = calderon.calderon_operator(sysm, +1)
        errs.append(float(np.max(np.abs(Cp - Cp_ref))))
    assert min(_orders(errs)) > 1.8


def test_reference_identities_all_scenarios(twisted_fam, frw_fam):
    flat = make_family()
    cases = [
        (flat, "periodic", 2.0),
        (flat, "dirichlet", 2.0),
        (twisted_fam, "dirichlet", 2.0),
        (frw_fam, "dirichlet", 1.0),
    ]
    for fam, bc, extent in cases:
        for nu in (0.0, 2.0):
            Cp = calderon.reference_calderon(fam, nu, bc, extent, +1)
            Cm = calderon.reference_calderon(fam, nu, bc, extent, -1)
            ref = reference.mode_reference(fam, nu, bc, extent)
            rep = calderon.verify_calderon_identities(
                Cp, Cm, reference.reflection_matrix(ref)
            )
            tol = 1e-12 if fam.is_stationary() else 1e-10
            assert rep.sum_residual < tol
            assert rep.positivity_min > -tol
            assert rep.reflection_residual < tol
            if bc == "dirichlet":
                assert rep.projection_defect < tol


def test_thermal_calderon_is_not_a_projection(flat_fam):
    # compact thermal circle: C+ mixes both sides, (C+)^2 != C+
    Cp = calderon.reference_calderon(flat_fam, 0.0, "periodic", 2.0, +1)
    assert np.max(np.abs(Cp @ Cp - Cp)) > 0.01


def test_closed_form_slab_and_thermal(flat_fam):
    L = beta = 2.0
    for nu in (0.0, 1.0, 2.0):
        om = np.sqrt(nu * nu + 1.0)
        Cp = calderon.reference_calderon(flat_fam, nu, "dirichlet", L, +1)
        slab = 0.5 * np.array(
            [[1.0, np.tanh(om * L) / om], [om / np.tanh(om * L), 1.0]]
        )
        assert np.max(np.abs(Cp - slab)) < 1e-12
        Cp = calderon.reference_calderon(flat_fam, nu, "periodic", beta, +1)
        th = 0.5 * np.array(
            [
                [1.0, 1.0 / (om * np.tanh(om * beta / 2.0))],
                [om / np.tanh(om * beta / 2.0), 1.0],
            ]
        )
        assert np.max(np.abs(Cp - th)) < 1e-12


def test_grid_reflection_formula_discrete_exact(twisted_fam):
    sysm = elliptic.assemble_K(twisted_fam, 2.0, "dirichlet", 2.0, 101)
    Cp = calderon.calderon_operator(sysm, +1)
    rhs = calderon.reflection_rhs_operator(sysm)
    assert np.max(np.abs(Cp @ calderon.Q_MATRIX - rhs)) < 1e-11


def test_green_identities_second_order(twisted_fam):
    nu = 1.0
    ops = calderon.build_boundary_operators(twisted_fam, nu)
    errs = []
    for n_s in (101, 201, 401):
        sysm = elliptic.assemble_K(twisted_fam, nu, "dirichlet", 2.0, n_s)
        rng = np.random.default_rng(3)
        u = _smooth_field(rng, sysm)
        v = _smooth_field(rng, sysm)
        worst = 0.0
        for side in (+1, -1):
            r1, r2 = calderon.green_identity_check(sysm, u, v, side, ops=ops)
            worst = max(worst, r1, r2)
        errs.append(worst)
    assert min(_orders(errs)) > 1.8


def test_cutoff_identities_converge(flat_fam):
    nu = 1.0
    f = np.array([0.0, 1.0])
    g = np.array([0.0, 0.7 + 0.2j])
    errs = []
    for n_s in (101, 201, 401):
        sysm = elliptic.assemble_K(flat_fam, nu, "periodic", 2.0, n_s)
        chi = _bump(sysm.s_grid, 1.0)
        ra, rb = calderon.cutoff_identity_check(sysm, chi, f, g)
        errs.append(max(ra, rb))
    assert min(_orders(errs)) > 1.8


def test_cutoff_identity_b_exact_without_twist(flat_fam):
    # for w = 0 both sides of identity B are assembled from the same
    # discrete inverse and agree to round-off at any resolution
    sysm = elliptic.assemble_K(flat_fam, 1.0, "dirichlet", 2.0, 101)
    chi = _bump(sysm.s_grid, 2.0)
    _, rb = calderon.cutoff_identity_check(
        sysm, chi, np.array([0.0, 1.0]), np.array([0.3, 0.7j])
    )
    assert rb < 1e-12


def test_cutoff_with_sloped_chi_rejected(flat_fam):
    sysm = elliptic.assemble_K(flat_fam, 1.0, "dirichlet", 2.0, 101)
    chi = 1.0 + 0.2 * sysm.s_grid
    with pytest.raises(CutoffViolation):
        calderon.cutoff_identity_check(
            sysm, chi, np.array([0.0, 1.0]), np.array([0.0, 1.0])
        )


def test_boundary_operator_identities(twisted_fam):
    ops = calderon.build_boundary_operators(twisted_fam, 2.0)
    assert ops.identity_defect() < 1e-14
