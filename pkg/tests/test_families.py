"""Registry families: evaluation, reality condition, parameter validation."""

import numpy as np
import pytest

from calwick.errors import ConfigError
from calwick.families import AnalyticFunction, CoefficientFamily, constant


def test_constant_family_is_constant():
    f = constant(2.5)
    z = np.array([0.0, 1.0 + 2.0j, -3.0j])
    assert np.allclose(f(z), 2.5)


def test_cosh_scale_matches_formula():
    f = AnalyticFunction("cosh_scale", (0.5, 0.5, 2.0))
    z = 0.3 + 0.7j
    assert f(z) == pytest.approx(0.5 + 0.5 * np.cosh(2.0 * z))


def test_cosh_scale_wick_rotation_gives_cos_squared():
    # 1/2 + cosh(2 i s)/2 = cos(s)^2 on the imaginary axis
    f = AnalyticFunction("cosh_scale", (0.5, 0.5, 2.0))
    s = np.linspace(-1.3, 1.3, 41)
    vals = f.at_imag(s)
    assert np.max(np.abs(vals - np.cos(s) ** 2)) < 1e-14
    assert np.max(np.abs(vals.imag)) < 1e-14


def test_trig_poly_and_exp_poly_evaluate():
    g = AnalyticFunction("trig_poly", (1.0, 0.5, -0.25))
    z = 0.2 - 0.4j
    assert g(z) == pytest.approx(1.0 + 0.5 * np.cos(z) - 0.25 * np.sin(z))
    e = AnalyticFunction("exp_poly", (2.0, -1.0))
    assert e(z) == pytest.approx(2.0 * np.exp(-z))


@pytest.mark.parametrize(
    "family,params",
    [
        ("nosuch", (1.0,)),
        ("constant", (1.0, 2.0)),
        ("cosh_scale", (1.0,)),
        ("trig_poly", (1.0, 2.0)),
        ("exp_poly", (1.0,)),
        ("constant", (float("nan"),)),
    ],
)
def test_bad_family_parameters_raise(family, params):
    with pytest.raises(ConfigError):
        AnalyticFunction(family, params)


def test_reality_condition_holds_for_registry_families():
    fam = CoefficientFamily(
        N=AnalyticFunction("exp_poly", (1.0, 0.3)),
        h=AnalyticFunction("cosh_scale", (0.5, 0.5, 2.0)),
        w=AnalyticFunction("trig_poly", (0.1, 0.2, 0.3)),
        mu=constant(1.0),
    )
    rng = np.random.default_rng(0)
    z = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    assert fam.reality_defect(z) < 1e-13


def test_is_stationary():
    flat = CoefficientFamily(constant(1.0), constant(1.0), constant(0.0), constant(1.0))
    assert flat.is_stationary()
    frw = CoefficientFamily(
        constant(1.0),
        AnalyticFunction("cosh_scale", (0.5, 0.5, 2.0)),
        constant(0.0),
        constant(1.0),
    )
    assert not frw.is_stationary()
