"""Fourier-mode reduction of the complex Laplacian on the rotated slab.

With coefficients depending on s alone and the spatial slice a circle of
circumference ell, the operator

    K = -|k|^{-1/2} d_a k^{ab} |k|^{1/2} d_b + lambda

block-diagonalizes over e^{i nu y}, nu = 2 pi m / ell.  Writing p = k^ss,
r = k^sy, q = k^yy and rho = |k|^{1/2} = N(is) h(is)^{1/2}, the mode operator
acting on u(s) is

    K_nu u = -rho^-1 (rho p u')' - i nu [ rho^-1 (rho r u)' + r u' ]
             + (nu^2 q + lambda) u.

For the rotated metric the cross coefficient is purely imaginary,
r = -i w(is) / N(is)^2, so the first-order term is real whenever w is, and
the operator satisfies K_nu^* = kappa K_nu kappa with kappa u(s) = u(-s).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .families import CoefficientFamily


def mode_symbols(n_modes: int, circumference: float) -> np.ndarray:
    """Symbols nu for the mode set m = -n_modes..n_modes (inclusive)."""
    m = np.arange(-n_modes, n_modes + 1)
    return 2.0 * np.pi * m / circumference


@dataclass(frozen=True)
class ModeReduction:
    """Scalar coefficient functions of the per-mode operators K_nu.

    The callables below take arrays of s and return complex arrays; they are
    shared across all modes, the mode symbol nu only enters the assembled
    operator.
    """

    fam: CoefficientFamily

    def p(self, s):
        """Principal coefficient k^ss = 1 / N^2(is)."""
        N = self.fam.N.at_imag(s)
        return 1.0 / (N * N)

    def r_c(self, s):
        """Cross coefficient k^sy = -i w(is) / N^2(is)."""
        N = self.fam.N.at_imag(s)
        w = self.fam.w.at_imag(s)
        return -1j * w / (N * N)

    def q_tilde(self, s):
        """Angular coefficient k^yy = (N^2 - h w^2)(is) / (N^2 h)(is)."""
        N = self.fam.N.at_imag(s)
        h = self.fam.h.at_imag(s)
        w = self.fam.w.at_imag(s)
        return (N * N - h * w * w) / (N * N * h)

    def rho(self, s):
        """Half-density |k|^{1/2} = N(is) h(is)^{1/2}."""
        N = self.fam.N.at_imag(s)
        h = self.fam.h.at_imag(s)
        return N * np.sqrt(h)

    def lam(self, s):
        """Zeroth-order coefficient lambda(s) = mu(is)."""
        return self.fam.mu.at_imag(s)

    def potential(self, s, nu: float):
        """Full zeroth-order potential nu^2 q + lambda of K_nu."""
        return nu * nu * self.q_tilde(s) + self.lam(s)

    def stationary_values(self):
        """Constant coefficient values (p, r_c, q, lambda, rho) at s = 0.

        Only meaningful when the family is stationary; used by the
        closed-form reference path.
        """
        z = np.zeros(1)
        return (
            complex(self.p(z)[0]),
            complex(self.r_c(z)[0]),
            complex(self.q_tilde(z)[0]),
            complex(self.lam(z)[0]),
            complex(self.rho(z)[0]),
        )

    def boundary_weight(self) -> float:
        """Surface density w_sigma = h(0)^{1/2} on the interface s = 0."""
        h0 = complex(self.fam.h.at_imag(0.0))
        return float(np.sqrt(h0.real))

    def normal(self) -> tuple[complex, complex]:
        """Inward (toward s > 0) conormal n = -(k^ss, k^ys)/sqrt(k^ss) at s=0.

        Normalized so that n . k . n = 1; for the rotated metric the y
        component is purely imaginary.
        """
        z = np.zeros(1)
        p0 = complex(self.p(z)[0])
        r0 = complex(self.r_c(z)[0])
        root = np.sqrt(p0)
        return (-root, -r0 / root)

    def boundary_symbol(self, nu: float) -> complex:
        """First-order boundary coefficient b = i nu w(0) / N(0)."""
        N0 = complex(self.fam.N.at_imag(0.0))
        w0 = complex(self.fam.w.at_imag(0.0))
        return 1j * nu * w0 / N0
