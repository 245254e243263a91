"""Cauchy evolutions of the mode system and the commutator identity."""

import numpy as np
import pytest

from calwick import lorentzian
from calwick.errors import CflViolation, WindowExceeded

from conftest import make_family


def test_frequency_flat():
    fam = make_family()
    assert lorentzian.lorentzian_frequency(fam, 2.0) == pytest.approx(np.sqrt(5.0))


def test_closed_form_invariants(twisted_fam):
    evo = lorentzian.evolve_modes(twisted_fam, 3.0, 2.0, 401)
    assert evo.integrator == "closed_form"
    assert evo.wronskian_defect() < 1e-13
    assert evo.energy_defect() < 1e-12
    assert lorentzian.verify_ccr(evo) < 1e-13
    assert lorentzian.time_reversal_defect(evo) < 1e-12


def test_even_node_count_rejected(flat_fam):
    with pytest.raises(WindowExceeded):
        lorentzian.evolve_modes(flat_fam, 1.0, 2.0, 400)


def test_node_outside_window(flat_fam):
    evo = lorentzian.evolve_modes(flat_fam, 1.0, 2.0, 101)
    with pytest.raises(WindowExceeded):
        evo.node(2.5)


def test_cfl_guard(frw_fam):
    with pytest.raises(CflViolation):
        lorentzian.evolve_modes(frw_fam, 32.0, 1.0, 33, integrator="rk4")


def test_rk4_matches_closed_form_fourth_order(flat_fam):
    nu = 2.0
    errs = []
    for n_t in (101, 201, 401):
        ref = lorentzian.evolve_modes(flat_fam, nu, 1.0, n_t)
        rk = lorentzian.evolve_modes(flat_fam, nu, 1.0, n_t, integrator="rk4")
        errs.append(float(np.max(np.abs(rk.c - ref.c) + np.abs(rk.s - ref.s))))
    orders = [np.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) > 3.8


def test_causal_propagator_antisymmetry_and_normalization(flat_fam):
    evo = lorentzian.evolve_modes(flat_fam, 1.0, 2.0, 401)
    G = lorentzian.propagator_kernel(evo)
    assert np.max(np.abs(G + G.conj().T)) < 1e-13   # i G is Hermitian
    # d/dt1 G at coincidence is 1/rho_g (canonical commutator normalization)
    j = evo.node(0.0)
    dG = (lorentzian.causal_propagator(evo, evo.t_grid[j + 1], 0.0)
          - lorentzian.causal_propagator(evo, evo.t_grid[j - 1], 0.0)) / (2 * evo.dt)
    assert dG == pytest.approx(1.0, abs=1e-4)


def test_dual_path_ccr_frw(frw_fam):
    evo = lorentzian.evolve_modes(frw_fam, 1.0, 1.0, 801, integrator="rk4")
    res = lorentzian.verify_ccr_dual(evo, n_steps=256)
    assert res < 1e-7


def test_dual_path_ccr_order(frw_fam):
    evo = lorentzian.evolve_modes(frw_fam, 2.0, 1.0, 1601, integrator="rk4")
    r1 = lorentzian.verify_ccr_dual(evo, n_steps=64)
    r2 = lorentzian.verify_ccr_dual(evo, n_steps=128)
    assert np.log2(r1 / r2) > 3.5


def test_evolve_cauchy_linearity(twisted_fam):
    evo = lorentzian.evolve_modes(twisted_fam, 2.0, 2.0, 401)
    t = evo.t_grid[300]
    f = np.array([0.3 - 0.1j, 1.2 + 0.4j])
    val = evo.evolve_cauchy(f, t)
    j = evo.node(t)
    assert val == pytest.approx(f[0] * evo.c[j] + 1j * f[1] * evo.s[j])
