"""Scenario configuration: parsing, validation, and derived objects.

Config files are flat `key = value` text with dotted section paths and
JSON-compatible values, e.g.

    name = "flat_thermal"
    metric.N = {"family": "constant", "params": [1.0]}
    euclidean.bc = "periodic"
    euclidean.beta = 2.0
    euclidean.n_s = 401

Validation failures raise ConfigError carrying the dotted key path.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .families import FAMILY_NAMES, AnalyticFunction, CoefficientFamily

KNOWN_CHECKS = (
    "hypotheses",
    "calderon_sum",
    "calderon_positivity",
    "reflection_formula",
    "calderon_closed_form",
    "calderon_projection",
    "calderon_nonprojection",
    "green_identities",
    "cutoff_identities",
    "ccr",
    "state_properties",
    "equal_time_amplitude",
    "two_time_wick",
    "kms",
)

_REQUIRED = (
    "name",
    "metric.N",
    "metric.h",
    "metric.w",
    "metric.mu",
    "sigma.circumference",
    "euclidean.bc",
    "euclidean.n_s",
    "lorentzian.T",
    "lorentzian.n_t",
)


@dataclass
class ScenarioConfig:
    """Validated scenario description."""

    name: str
    metric: dict                  # coefficient name -> AnalyticFunction
    circumference: float
    mode_max: int
    bc: str
    extent: float                 # L (dirichlet) or beta (periodic)
    n_s: int
    T: float
    n_t: int
    integrator: str
    checks: tuple
    out_dir: str
    out_format: str
    raw: dict = field(default_factory=dict, repr=False)

    def family(self) -> CoefficientFamily:
        return CoefficientFamily(
            N=self.metric["N"],
            h=self.metric["h"],
            w=self.metric["w"],
            mu=self.metric["mu"],
            circumference=self.circumference,
        )

    def modes(self):
        """Mode indices m = -mode_max .. mode_max."""
        return range(-self.mode_max, self.mode_max + 1)

    def content_hash(self) -> str:
        """Stable hash of the canonicalized raw key-value content."""
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _parse_lines(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`", key=str(lineno))
        key, _, value = stripped.partition("=")
        key = key.strip()
        try:
            out[key] = json.loads(value.strip())
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{key}: value is not valid JSON ({exc.msg})", key=key
            ) from exc
    return out


def _analytic(raw: dict, key: str) -> AnalyticFunction:
    spec = raw[key]
    if not isinstance(spec, dict) or set(spec) != {"family", "params"}:
        raise ConfigError(
            f'{key}: expected {{"family": ..., "params": [...]}}', key=key
        )
    if spec["family"] not in FAMILY_NAMES:
        raise ConfigError(
            f"{key}.family: unknown family {spec['family']!r}", key=f"{key}.family"
        )
    try:
        return AnalyticFunction(spec["family"], tuple(float(p) for p in spec["params"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}.params: {exc}", key=f"{key}.params") from exc


def validate(raw: dict) -> ScenarioConfig:
    for key in _REQUIRED:
        if key not in raw:
            raise ConfigError(f"{key}: required key missing", key=key)
    name = raw["name"]
    if not isinstance(name, str) or not name:
        raise ConfigError("name: must be a non-empty string", key="name")

    metric = {c: _analytic(raw, f"metric.{c}") for c in ("N", "h", "w", "mu")}

    circ = raw["sigma.circumference"]
    if not isinstance(circ, (int, float)) or circ <= 0:
        raise ConfigError(
            "sigma.circumference: must be a positive number", key="sigma.circumference"
        )
    if "sigma.mode_max" in raw:
        mode_max = raw["sigma.mode_max"]
    elif "sigma.n_y" in raw:
        n_y = raw["sigma.n_y"]
        if not isinstance(n_y, int) or n_y < 1:
            raise ConfigError("sigma.n_y: must be a positive integer", key="sigma.n_y")
        mode_max = (n_y - 1) // 2
    else:
        raise ConfigError(
            "sigma.mode_max: required (or sigma.n_y)", key="sigma.mode_max"
        )
    if not isinstance(mode_max, int) or mode_max < 0:
        raise ConfigError(
            "sigma.mode_max: must be a non-negative integer", key="sigma.mode_max"
        )

    bc = raw["euclidean.bc"]
    if bc not in ("dirichlet", "periodic"):
        raise ConfigError(
            f"euclidean.bc: {bc!r} is not dirichlet|periodic", key="euclidean.bc"
        )
    has_L = "euclidean.L" in raw
    has_beta = "euclidean.beta" in raw
    if has_L and has_beta:
        raise ConfigError(
            "euclidean.bc: give exactly one of euclidean.L (dirichlet) or "
            "euclidean.beta (periodic)",
            key="euclidean.bc",
        )
    if bc == "dirichlet":
        if not has_L:
            raise ConfigError("euclidean.L: required for a dirichlet slab", key="euclidean.L")
        extent = raw["euclidean.L"]
        extent_key = "euclidean.L"
    else:
        if not has_beta:
            raise ConfigError(
                "euclidean.beta: required for a periodic circle", key="euclidean.beta"
            )
        extent = raw["euclidean.beta"]
        extent_key = "euclidean.beta"
    if not isinstance(extent, (int, float)) or extent <= 0:
        raise ConfigError(f"{extent_key}: must be a positive number", key=extent_key)

    n_s = raw["euclidean.n_s"]
    if not isinstance(n_s, int) or n_s < 33 or n_s % 2 == 0:
        raise ConfigError(
            "euclidean.n_s: must be an odd integer >= 33", key="euclidean.n_s"
        )

    T = raw["lorentzian.T"]
    if not isinstance(T, (int, float)) or T <= 0:
        raise ConfigError("lorentzian.T: must be a positive number", key="lorentzian.T")
    n_t = raw["lorentzian.n_t"]
    if not isinstance(n_t, int) or n_t < 33 or n_t % 2 == 0:
        raise ConfigError(
            "lorentzian.n_t: must be an odd integer >= 33", key="lorentzian.n_t"
        )
    integrator = raw.get("lorentzian.integrator", "auto")
    if integrator not in ("closed_form", "rk4", "auto"):
        raise ConfigError(
            f"lorentzian.integrator: {integrator!r} is not closed_form|rk4|auto",
            key="lorentzian.integrator",
        )

    checks = raw.get("checks", list(KNOWN_CHECKS))
    if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
        raise ConfigError("checks: must be a list of check ids", key="checks")
    for c in checks:
        if c not in KNOWN_CHECKS:
            raise ConfigError(f"checks: unknown check id {c!r}", key="checks")

    out_dir = raw.get("output.dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.dir: must be a non-empty string", key="output.dir")
    out_format = raw.get("output.format", "csv")
    if out_format not in ("csv", "json"):
        raise ConfigError(
            f"output.format: {out_format!r} is not csv|json", key="output.format"
        )

    return ScenarioConfig(
        name=name,
        metric=metric,
        circumference=float(circ),
        mode_max=mode_max,
        bc=bc,
        extent=float(extent),
        n_s=n_s,
        T=float(T),
        n_t=n_t,
        integrator=integrator,
        checks=tuple(checks),
        out_dir=out_dir,
        out_format=out_format,
        raw=dict(raw),
    )


def parse_config(path: str) -> ScenarioConfig:
    """Load and validate a scenario config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", key=path) from exc
    return validate(_parse_lines(text))
