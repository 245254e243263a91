"""Config parsing and validation for scenario files."""

import pytest

from calwick import scenario
from calwick.errors import ConfigError

GOOD = """
name = "demo"
metric.N = {"family": "constant", "params": [1.0]}
metric.h = {"family": "constant", "params": [1.0]}
metric.w = {"family": "constant", "params": [0.0]}
metric.mu = {"family": "constant", "params": [1.0]}
sigma.circumference = 6.283185307179586
sigma.mode_max = 4
euclidean.bc = "dirichlet"
euclidean.L = 2.0
euclidean.n_s = 101
lorentzian.T = 1.0
lorentzian.n_t = 101
"""


def _raw(extra=None, drop=None):
    raw = scenario._parse_lines(GOOD)
    if drop:
        raw.pop(drop)
    if extra:
        raw.update(extra)
    return raw


def test_shipped_configs_parse(config_dir):
    names = ("flat_thermal", "flat_slab", "twisted_slab", "frw_slab")
    for name in names:
        cfg = scenario.parse_config(str(config_dir / f"{name}.cfg"))
        assert cfg.name == name
        assert cfg.mode_max == 32
        fam = cfg.family()
        assert fam.mu.at_imag(0.0).real > 0.0
        assert set(cfg.checks) <= set(scenario.KNOWN_CHECKS)
        assert len(cfg.content_hash()) == 16


def test_valid_minimal_config():
    cfg = scenario.validate(_raw())
    assert cfg.bc == "dirichlet"
    assert cfg.extent == 2.0
    assert cfg.integrator == "auto"
    assert cfg.out_format == "csv"
    assert list(cfg.modes()) == list(range(-4, 5))
    assert cfg.checks == scenario.KNOWN_CHECKS


def test_missing_required_key():
    with pytest.raises(ConfigError) as exc:
        scenario.validate(_raw(drop="metric.N"))
    assert exc.value.key == "metric.N"


def test_both_extents_rejected():
    with pytest.raises(ConfigError) as exc:
        scenario.validate(_raw(extra={"euclidean.beta": 2.0}))
    assert exc.value.key == "euclidean.bc"


def test_periodic_needs_beta():
    raw = _raw(extra={"euclidean.bc": "periodic"}, drop="euclidean.L")
    with pytest.raises(ConfigError) as exc:
        scenario.validate(raw)
    assert exc.value.key == "euclidean.beta"


def test_even_grid_rejected():
    with pytest.raises(ConfigError) as exc:
        scenario.validate(_raw(extra={"euclidean.n_s": 100}))
    assert exc.value.key == "euclidean.n_s"


def test_unknown_family_and_check():
    with pytest.raises(ConfigError):
        scenario.validate(
            _raw(extra={"metric.N": {"family": "bogus", "params": [1.0]}})
        )
    with pytest.raises(ConfigError) as exc:
        scenario.validate(_raw(extra={"checks": ["no_such_check"]}))
    assert exc.value.key == "checks"


def test_bad_integrator_and_format():
    with pytest.raises(ConfigError):
        scenario.validate(_raw(extra={"lorentzian.integrator": "euler"}))
    with pytest.raises(ConfigError):
        scenario.validate(_raw(extra={"output.format": "xml"}))


def test_bad_json_value(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text('name = "x"\neuclidean.n_s = not-json\n')
    with pytest.raises(ConfigError) as exc:
        scenario.parse_config(str(path))
    assert exc.value.key == "euclidean.n_s"


def test_content_hash_stable_under_reordering():
    a = scenario.validate(_raw())
    lines = GOOD.strip().splitlines()
    b = scenario.validate(scenario._parse_lines("\n".join(reversed(lines))))
    assert a.content_hash() == b.content_hash()
