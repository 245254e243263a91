"""Wick-rotated metric, hypothesis sampling, and the reflection involution."""

import numpy as np
import pytest

from calwick import geometry
from calwick.errors import GridAsymmetry, HypothesisViolation, NonLorentzian
from calwick.families import AnalyticFunction, CoefficientFamily, constant

from conftest import make_family


def test_lorentzian_matrix_entries(twisted_fam):
    g = geometry.eval_lorentzian(twisted_fam, 0.7)
    # g_tt = -N^2 + h w^2, g_ty = h w, g_yy = h
    assert g[0, 0] == pytest.approx(-1.0 + 0.25)
    assert g[0, 1] == pytest.approx(0.5)
    assert g[1, 1] == pytest.approx(1.0)


def test_non_lorentzian_raises():
    fam = make_family(h=-1.0)
    with pytest.raises(NonLorentzian):
        geometry.eval_lorentzian(fam, 0.0)


def test_det_k_equals_N2_h(twisted_fam, frw_fam):
    for fam in (twisted_fam, frw_fam):
        for s in (0.0, 0.3, -0.8):
            sample = geometry.eval_complex_metric(fam, s)
            N2h = complex(fam.N.at_imag(s)) ** 2 * complex(fam.h.at_imag(s))
            assert sample.det_k == pytest.approx(N2h.real, rel=1e-13)
            assert sample.half_density == pytest.approx(np.sqrt(sample.det_k))


def test_negative_determinant_detected():
    # h(is) = 2 - cosh(s) goes negative past s ~ 1.32
    fam = CoefficientFamily(
        N=constant(1.0),
        h=AnalyticFunction("trig_poly", (2.0, -1.0, 0.0)),
        w=constant(0.0),
        mu=constant(1.0),
    )
    geometry.eval_complex_metric(fam, 0.5)   # fine inside
    with pytest.raises(HypothesisViolation):
        geometry.eval_complex_metric(fam, 2.0)


def test_hypothesis_report_shipped_families(flat_fam, twisted_fam, frw_fam):
    s = np.linspace(-1.0, 1.0, 65)
    for fam in (flat_fam, twisted_fam, frw_fam):
        rep = geometry.check_hypotheses(fam, s)
        assert rep.passed, rep.failures
        assert rep.min_det > 0.0
        assert rep.min_axis_margin > 1e-3
    # flat static metric has a real quadratic form: coercivity constant 0
    assert geometry.check_hypotheses(flat_fam, s).coercivity_constant == 0.0
    assert geometry.check_hypotheses(twisted_fam, s).coercivity_constant > 0.0


def test_hypothesis_report_collects_failures():
    fam = CoefficientFamily(
        N=constant(1.0),
        h=AnalyticFunction("trig_poly", (2.0, -1.0, 0.0)),
        w=constant(0.0),
        mu=constant(1.0),
    )
    rep = geometry.check_hypotheses(fam, np.linspace(-2.0, 2.0, 33))
    assert not rep.passed
    assert rep.failures


def test_involution_roundtrip_slab():
    s = np.linspace(-2.0, 2.0, 17)
    inv = geometry.Involution(s)
    u = np.sin(s) + 1j * s**2
    assert np.allclose(inv(inv(u)), u)
    assert np.allclose(inv(u), np.sin(-s) + 1j * s**2)
    assert s[inv.center] == 0.0


def test_involution_periodic():
    beta = 2.0
    n = 16
    s = -beta / 2.0 + beta * np.arange(n) / n
    inv = geometry.Involution(s, periodic=True, period=beta)
    u = np.exp(2j * np.pi * s / beta)
    assert np.allclose(inv(u), np.exp(-2j * np.pi * s / beta))


def test_involution_rejects_asymmetric_grid():
    with pytest.raises(GridAsymmetry):
        geometry.Involution(np.array([-2.0, -0.5, 0.0, 1.0, 2.0]))
