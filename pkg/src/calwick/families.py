"""Registry of named analytic coefficient families.

Metric coefficients are entire functions of one complex variable z = t + i s
drawn from a small registry, with real parameter vectors.  Real parameters
guarantee the reality condition

    conj(f(z)) = f(conj(z)),

which is what makes the Lorentzian metric real on the real axis and ties the
Wick-rotated coefficients at z = i s to their complex conjugates at -s.
Restricting to a registry (instead of parsing arbitrary expressions) makes
this condition and analyticity hold by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

FAMILY_NAMES = ("constant", "trig_poly", "exp_poly", "cosh_scale")


@dataclass(frozen=True)
class AnalyticFunction:
    """One named analytic family with a fixed real parameter vector."""

    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in FAMILY_NAMES:
            raise ConfigError(f"unknown family {self.family!r}", key="family")
        params = tuple(float(p) for p in self.params)
        if any(not np.isfinite(p) for p in params):
            raise ConfigError("non-finite family parameter", key="params")
        object.__setattr__(self, "params", params)
        if self.family == "constant" and len(params) != 1:
            raise ConfigError("constant family takes 1 parameter", key="params")
        if self.family == "cosh_scale" and len(params) != 3:
            raise ConfigError("cosh_scale family takes 3 parameters", key="params")
        if self.family == "trig_poly" and len(params) % 2 != 1:
            raise ConfigError(
                "trig_poly takes parameters [a0, a1, b1, a2, b2, ...]", key="params"
            )
        if self.family == "exp_poly" and (len(params) == 0 or len(params) % 2 != 0):
            raise ConfigError(
                "exp_poly takes parameter pairs [c1, alpha1, c2, alpha2, ...]",
                key="params",
            )

    def __call__(self, z):
        """Evaluate the family at complex (or real) z, vectorized."""
        z = np.asarray(z)
        p = self.params
        if self.family == "constant":
            return p[0] + 0.0 * z
        if self.family == "cosh_scale":
            c0, c1, c2 = p
            return c0 + c1 * np.cosh(c2 * z)
        if self.family == "trig_poly":
            out = p[0] + 0.0j * z
            for m in range(1, (len(p) - 1) // 2 + 1):
                a, b = p[2 * m - 1], p[2 * m]
                out = out + a * np.cos(m * z) + b * np.sin(m * z)
            return out
        # exp_poly
        out = 0.0j * z
        for j in range(len(p) // 2):
            c, alpha = p[2 * j], p[2 * j + 1]
            out = out + c * np.exp(alpha * z)
        return out

    def at_imag(self, s):
        """Evaluate at z = i s (the Wick-rotated axis)."""
        return self(1j * np.asarray(s, dtype=float))

    def at_real(self, t):
        """Evaluate at real z = t, returning a real array."""
        val = self(np.asarray(t, dtype=float) + 0.0j)
        return np.real(val)


def constant(value: float) -> AnalyticFunction:
    return AnalyticFunction("constant", (value,))


@dataclass(frozen=True)
class CoefficientFamily:
    """The four metric coefficient functions of a 1+1d scenario.

    N is the lapse, h the (scalar) spatial metric on the circle, w the shift
    and mu the mass term.  All are functions of z alone; the spatial slice is
    a circle of the given circumference, so Fourier modes decouple exactly.
    """

    N: AnalyticFunction
    h: AnalyticFunction
    w: AnalyticFunction
    mu: AnalyticFunction
    circumference: float = 2.0 * np.pi

    def reality_defect(self, z_samples) -> float:
        """Max relative defect of conj(f(z)) - f(conj z) over a sample set.

        Zero up to rounding for every registry family with real parameters;
        kept as an executable assertion of the standing reality condition.
        """
        worst = 0.0
        for f in (self.N, self.h, self.w, self.mu):
            vals = f(np.asarray(z_samples))
            mirror = f(np.conj(np.asarray(z_samples)))
            defect = np.abs(np.conj(vals) - mirror) / (1.0 + np.abs(vals))
            worst = max(worst, float(np.max(defect)))
        return worst

    def is_stationary(self) -> bool:
        """True when all coefficients are constant in z."""
        return all(
            f.family == "constant" for f in (self.N, self.h, self.w, self.mu)
        )
