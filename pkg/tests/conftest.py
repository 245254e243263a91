import pathlib

import numpy as np
import pytest

from calwick.families import AnalyticFunction, CoefficientFamily, constant

REPO = pathlib.Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"


def make_family(N=1.0, h=1.0, w=0.0, mu=1.0, circumference=2.0 * np.pi):
    """Constant-coefficient family shorthand for tests."""
    return CoefficientFamily(
        N=constant(N), h=constant(h), w=constant(w), mu=constant(mu),
        circumference=circumference,
    )


@pytest.fixture
def flat_fam():
    return make_family()


@pytest.fixture
def twisted_fam():
    return make_family(w=0.5)


@pytest.fixture
def frw_fam():
    # expanding circle h(t) = cosh(t)^2, written as 1/2 + cosh(2t)/2
    return CoefficientFamily(
        N=constant(1.0),
        h=AnalyticFunction("cosh_scale", (0.5, 0.5, 2.0)),
        w=constant(0.0),
        mu=constant(1.0),
    )


@pytest.fixture
def config_dir():
    return CONFIGS
