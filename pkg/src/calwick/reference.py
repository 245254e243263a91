"""Per-mode reference solutions of K_nu at round-off accuracy.

The boundary operators of this package are defined through K^-1, and the
interface lives at the single point s = 0, so everything needed from the
inverse reduces to one-sided data of the normalized homogeneous solutions:

  slab (Dirichlet at +-L):  u_R with u_R(0)=1, u_R(L)=0 on (0,L), and u_L
      mirrored on (-L,0); only u_L'(0), u_R'(0) enter the boundary algebra.
  circle of length beta:    the wrapped Green profile u_per on (0,beta) with
      u_per(0+) = u_per(beta-) = 1; its one-sided first and second
      derivatives at the seam s=0 enter.

For constant coefficients these are closed forms built from the
characteristic roots m = a +- omega_p of p m^2 + 2 i nu r m - (nu^2 q + lam)
= 0 with a = -i nu r / p.  Variable-coefficient slabs are handled by
adaptive high-order shooting from the far Dirichlet end on each half
interval, which is stable because the wanted solution grows away from its
boundary zero.

The layer-potential algebra (the adjoint trace gamma* applied to a boundary
pair, solved through the Green function) is carried out exactly on this
data, which is what makes the Calderon matrices here independent of any
finite-difference grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergent, NotStationary
from .families import CoefficientFamily
from .modes import ModeReduction


def _half_shoot_derivative(
    red: ModeReduction, nu: float, far: float, rtol: float = 1e-13
) -> complex:
    """u'(0)/u(0) for the solution of K_nu u = 0 vanishing at s = far.

    Integrates the first-order divergence-form system

        u' = (v - i nu rho r u) / (rho p),   v = rho p u' + i nu rho r u,
        v' = -i nu rho r u' + rho (nu^2 q + lam) u,

    from the far Dirichlet end toward 0 with a high-order adaptive scheme.
    The wanted solution grows away from its zero, so shooting in this
    direction is stable, and the log-derivative at 0 is insensitive to the
    (arbitrary) initial slope.
    """
    from scipy.integrate import solve_ivp

    def rhs(s, yv):
        u, v = yv[0], yv[1]
        rho = complex(red.rho(s))
        p = complex(red.p(s))
        r = complex(red.r_c(s))
        pot = complex(red.potential(np.asarray(s), nu))
        du = (v - 1j * nu * rho * r * u) / (rho * p)
        dv = -1j * nu * rho * r * du + rho * pot * u
        return [du, dv]

    rho_f = complex(red.rho(far))
    p_f = complex(red.p(far))
    y0 = [0.0 + 0.0j, rho_f * p_f]
    sol = solve_ivp(
        rhs,
        (far, 0.0),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=1e-280,
        first_step=abs(far) / 256.0,
    )
    if not sol.success:
        raise NonConvergent(f"shooting from s={far} failed: {sol.message}")
    u0, v0 = sol.y[0, -1], sol.y[1, -1]
    rho0 = complex(red.rho(0.0))
    p0 = complex(red.p(0.0))
    r0 = complex(red.r_c(0.0))
    du0 = (v0 - 1j * nu * rho0 * r0 * u0) / (rho0 * p0)
    return complex(du0 / u0)


@dataclass
class ModeReference:
    """Reference boundary data of K_nu under one bc, one Fourier mode."""

    red: ModeReduction
    nu: float
    bc: str                 # "dirichlet" | "periodic"
    extent: float
    duL0: complex           # one-sided derivative at 0- of the left profile
    duR0: complex           # one-sided derivative at 0+ of the right profile
    ddL0: complex | None    # second derivatives, periodic case only
    ddR0: complex | None
    a: complex              # -i nu r / p at s = 0
    omega_p: complex | None  # characteristic frequency, stationary only

    @property
    def C0(self) -> complex:
        """Green normalization -rho p (u_L u_R' - u_L' u_R) at s = 0."""
        z = np.zeros(1)
        rp = complex(self.red.rho(z)[0]) * complex(self.red.p(z)[0])
        return -rp * (self.duR0 - self.duL0)

    def side_trace(self, A: complex, B: complex, side: int) -> tuple[complex, complex]:
        """(u(0+-), u'(0+-)) of u = K^-1 applied to the layer
        w_sigma [A delta + B (d/ds') G-source], divided by w_sigma.

        A multiplies the monopole layer, B the dipole moment (the
        coefficient of d/ds' G(s, s')|_{s'=0}).
        """
        C0 = self.C0
        if self.bc == "dirichlet":
            # G(s,s') = uL(s_<) uR(s_>) / C(s'), C(s') = C0 exp(2 a s').
            if side > 0:
                fac = (A + B * (self.duL0 - 2.0 * self.a)) / C0
                return fac, self.duR0 * fac
            fac = (A + B * (self.duR0 - 2.0 * self.a)) / C0
            return fac, self.duL0 * fac
        # Periodic: G(s,s') = u_per((s - s') mod beta)/C0, so the s'
        # derivative brings down -u_per'.
        if side > 0:
            val = (A - B * self.duR0) / C0
            der = (A * self.duR0 - B * self.ddR0) / C0
        else:
            val = (A - B * self.duL0) / C0
            der = (A * self.duL0 - B * self.ddL0) / C0
        return val, der

    def green(self, s1: float, s2: float) -> complex:
        """K^-1 kernel value G(s1, s2); stationary scenarios only."""
        if self.omega_p is None:
            raise NotStationary("kernel extraction needs constant coefficients")
        z = np.zeros(1)
        rp = complex(self.red.rho(z)[0]) * complex(self.red.p(z)[0])
        a, w = self.a, self.omega_p
        if self.bc == "dirichlet":
            L = self.extent
            lo, hi = min(s1, s2), max(s1, s2)
            C = rp * w * (_coth(w * (L - s2)) + _coth(w * (L + s2)))
            # profiles normalized to 1 at the source point
            uL = np.exp(a * (lo - s2)) * np.sinh(w * (L + lo)) / np.sinh(w * (L + s2))
            uR = np.exp(a * (hi - s2)) * np.sinh(w * (L - hi)) / np.sinh(w * (L - s2))
            return complex(uL * uR / C)
        beta = self.extent
        sigma = (s1 - s2) % beta
        Acf, Bcf = self._periodic_coeffs()
        u = Acf * np.exp((a + w) * sigma) + Bcf * np.exp((a - w) * sigma)
        return complex(u / self.C0)

    def _periodic_coeffs(self) -> tuple[complex, complex]:
        beta = self.extent
        a, w = self.a, self.omega_p
        ep = np.exp((a + w) * beta)
        em = np.exp((a - w) * beta)
        # u(0)=1 and u(beta-)=1: A + B = 1, A ep + B em = 1.
        Acf = (1.0 - em) / (ep - em)
        return Acf, 1.0 - Acf


def _coth(z: complex) -> complex:
    return np.cosh(z) / np.sinh(z)


def _stationary_roots(red: ModeReduction, nu: float) -> tuple[complex, complex]:
    p, r, q, lam, _rho = red.stationary_values()
    a = -1j * nu * r / p
    c = nu * nu * q + lam
    omega_p = np.sqrt(c / p + a * a)
    return a, omega_p


def mode_reference(
    fam: CoefficientFamily,
    nu: float,
    bc: str,
    extent: float,
) -> ModeReference:
    """Build the reference boundary data for one mode."""
    red = ModeReduction(fam)
    if fam.is_stationary():
        a, w = _stationary_roots(red, nu)
        if bc == "dirichlet":
            L = extent
            duR0 = a - w * _coth(w * L)
            duL0 = a + w * _coth(w * L)
            return ModeReference(red, nu, bc, extent, duL0, duR0, None, None, a, w)
        beta = extent
        p, r, q, lam, _rho = red.stationary_values()
        c = nu * nu * q + lam
        ref = ModeReference(red, nu, bc, extent, 0.0, 0.0, None, None, a, w)
        Acf, Bcf = ref._periodic_coeffs()
        mp, mm = a + w, a - w
        duR0 = Acf * mp + Bcf * mm
        duL0 = Acf * mp * np.exp(mp * beta) + Bcf * mm * np.exp(mm * beta)
        # u'' from the homogeneous equation p u'' + 2 i nu r u' - c u = 0
        ddR0 = (c * 1.0 - 2j * nu * r * duR0) / p
        ddL0 = (c * 1.0 - 2j * nu * r * duL0) / p
        return ModeReference(red, nu, bc, extent, duL0, duR0, ddL0, ddR0, a, w)
    if bc != "dirichlet":
        raise NotStationary("periodic reference needs constant coefficients")
    L = extent
    z = np.zeros(1)
    a0 = complex(-1j * nu * red.r_c(z)[0] / red.p(z)[0])
    duR0 = _half_shoot_derivative(red, nu, L)
    duL0 = _half_shoot_derivative(red, nu, -L)
    return ModeReference(red, nu, bc, extent, duL0, duR0, None, None, a0, None)


def calderon_matrix(ref: ModeReference, side: int) -> np.ndarray:
    """Reference Calderon matrix C_+- = -+ gamma_+- K^-1 gamma* S per mode."""
    red = ref.red
    nu = ref.nu
    w_sigma = red.boundary_weight()
    n_s, n_y = red.normal()
    bstar = np.conj(red.boundary_symbol(nu))
    out = np.zeros((2, 2), dtype=complex)
    for j, f in enumerate((np.array([1.0, 0.0]), np.array([0.0, 1.0]))):
        g0 = 2j * bstar * f[0] - f[1]
        g1 = f[0]
        A = w_sigma * (g0 - 1j * nu * np.conj(n_y) * g1)
        B = w_sigma * np.conj(n_s) * g1
        val, der = ref.side_trace(A, B, side)
        t0 = val
        t1 = n_s * der + 1j * nu * n_y * val
        sgn = -1.0 if side > 0 else 1.0
        out[0, j] = sgn * t0
        out[1, j] = sgn * t1
    return out


def reflection_matrix(ref: ModeReference) -> np.ndarray:
    """gamma+ K^-1 kappa gamma* as a per-mode 2x2 matrix (right side of the
    reflection formula C+ q = gamma+ K^-1 kappa gamma*).

    kappa flips the dipole component of the layer (delta' is odd) and fixes
    the monopole, giving an independent route through the same inverse.
    """
    red = ref.red
    nu = ref.nu
    w_sigma = red.boundary_weight()
    n_s, n_y = red.normal()
    out = np.zeros((2, 2), dtype=complex)
    for j, f in enumerate((np.array([1.0, 0.0]), np.array([0.0, 1.0]))):
        A = w_sigma * (f[0] - 1j * nu * np.conj(n_y) * f[1])
        B = -w_sigma * np.conj(n_s) * f[1]
        val, der = ref.side_trace(A, B, +1)
        out[0, j] = val
        out[1, j] = n_s * der + 1j * nu * n_y * val
    return out
