"""Klein-Gordon Cauchy evolution per mode and the causal propagator.

On the Lorentzian side the field equation P u = 0, with

    P = -|g|^{-1/2} d_a |g|^{1/2} g^{ab} d_b + mu,

reduces on the mode e^{i nu y} to a second-order ODE in t.  In the
first-order variables

    v = h^{1/2} D u,   D u = N^{-1} (u' - i nu w u),

(D is the derivative along the future unit normal of the t = const slices)
the mode system is

    u' = i nu w u + (N / h^{1/2}) v,
    v' = i nu w v - N h^{1/2} (nu^2 / h + mu) u,

and for real coefficients the conjugated pairing conj(u1) v2 - conj(v1) u2
is exactly conserved.  The fundamental pair (c, s) is normalized by the
normal derivative, c(0) = 1, Dc(0) = 0, s(0) = 0, Ds(0) = 1, which is the
normalization of the Cauchy datum (u, i^-1 D u) used by the boundary-pair
conventions elsewhere in the package.

For stationary coefficients the pair is the closed form

    c(t) = e^{i nu w0 t} cos(omega t),
    s(t) = e^{i nu w0 t} N0 sin(omega t) / omega,
    omega = N0 sqrt(nu^2 / h0 + mu0),

and otherwise classical RK4 on a uniform t-grid through t = 0.  The causal
propagator per mode is

    G(t1, t2) = [s(t1) conj(c(t2)) - c(t1) conj(s(t2))] / w_sigma,

normalized so that U q U* = i G holds with the quadratures of adjoint_apply.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CflViolation, WindowExceeded
from .families import CoefficientFamily


def lorentzian_frequency(fam: CoefficientFamily, nu: float) -> float:
    """Mode frequency omega = N0 sqrt(nu^2 / h0 + mu0), stationary case."""
    N0 = float(np.real(fam.N.at_real(0.0)))
    h0 = float(np.real(fam.h.at_real(0.0)))
    mu0 = float(np.real(fam.mu.at_real(0.0)))
    return N0 * np.sqrt(nu * nu / h0 + mu0)


def _coeffs_at(fam: CoefficientFamily, t):
    N = np.real(fam.N.at_real(t))
    h = np.real(fam.h.at_real(t))
    w = np.real(fam.w.at_real(t))
    mu = np.real(fam.mu.at_real(t))
    return N, h, w, mu


@dataclass
class CauchyEvolution:
    """Fundamental solution pair of one mode on a uniform t-grid.

    c, s hold the field values; v_c, v_s the momenta h^{1/2} D u.  The grid
    always contains t = 0 (odd n_t), where the Cauchy data live.
    """

    fam: CoefficientFamily
    nu: float
    T: float
    t_grid: np.ndarray
    c: np.ndarray
    s: np.ndarray
    v_c: np.ndarray
    v_s: np.ndarray
    integrator: str          # "closed_form" | "rk4"
    w_sigma: float
    omega: float | None = None
    _rho_g: np.ndarray = field(default=None, repr=False)

    @property
    def rho_g(self) -> np.ndarray:
        """Volume half-density |g|^{1/2} = N h^{1/2} on the t-grid."""
        if self._rho_g is None:
            N, h, _w, _mu = _coeffs_at(self.fam, self.t_grid)
            object.__setattr__(self, "_rho_g", np.asarray(N * np.sqrt(h)))
        return self._rho_g

    @property
    def dt(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])

    def node(self, t: float) -> int:
        """Grid index of the time t; WindowExceeded if off-grid."""
        if abs(t) > self.T + 1e-12:
            raise WindowExceeded(f"|t| = {abs(t)} exceeds the window T = {self.T}")
        j = int(round((t - self.t_grid[0]) / self.dt))
        if not (0 <= j < len(self.t_grid)) or abs(self.t_grid[j] - t) > 1e-9 * max(1.0, self.T):
            raise WindowExceeded(f"t = {t} is not a node of the evolution grid")
        return j

    def rows(self) -> np.ndarray:
        """The (n_t, 2) array of rows (c(t), i s(t)) representing U per mode."""
        return np.stack([self.c, 1j * self.s], axis=1)

    def evolve_cauchy(self, f, t: float) -> complex:
        """Value at time t of the solution with Cauchy datum (u, i^-1 D u) = f."""
        j = self.node(t)
        f = np.asarray(f, dtype=complex)
        return complex(f[0] * self.c[j] + 1j * f[1] * self.s[j])

    def adjoint_apply(self, phi: np.ndarray) -> np.ndarray:
        """U* against the discrete L^2(M, g) pairing (trapezoid in t).

        phi is a test function sampled on the t-grid; returns the boundary
        pair (A, -iB)/w_sigma with A = <c, phi>_M, B = <s, phi>_M.
        """
        phi = np.asarray(phi, dtype=complex)
        if phi.shape != self.t_grid.shape:
            raise WindowExceeded("test function does not live on the evolution grid")
        w = np.full(len(self.t_grid), self.dt)
        w[0] *= 0.5
        w[-1] *= 0.5
        wq = w * self.rho_g
        A = np.sum(np.conj(self.c) * phi * wq)
        B = np.sum(np.conj(self.s) * phi * wq)
        return np.array([A, -1j * B]) / self.w_sigma

    def wronskian_defect(self) -> float:
        """max_t |conj(c) v_s - conj(v_c) s - w_sigma| / w_sigma."""
        wr = np.conj(self.c) * self.v_s - np.conj(self.v_c) * self.s
        return float(np.max(np.abs(wr - self.w_sigma)) / self.w_sigma)

    def energy_defect(self) -> float:
        """Relative drift of (|Du|^2 + omega^2 |u|^2)/2; stationary only."""
        if self.omega is None:
            raise WindowExceeded("energy is conserved only for stationary coefficients")
        du = self.v_s / self.w_sigma
        e = 0.5 * (np.abs(du) ** 2 + self.omega**2 * np.abs(self.s) ** 2)
        return float(np.max(np.abs(e - e[len(e) // 2])) / max(np.max(e), 1e-300))


def _rk4_march(fam: CoefficientFamily, nu: float, t_grid: np.ndarray, y0: np.ndarray):
    """March the first-order mode system from the center node both ways."""

    def rhs(t, y):
        N, h, w, mu = _coeffs_at(fam, float(t))
        rt = np.sqrt(h)
        u, v = y
        du = 1j * nu * w * u + (N / rt) * v
        dv = 1j * nu * w * v - N * rt * (nu * nu / h + mu) * u
        return np.array([du, dv])

    n = len(t_grid)
    cidx = n // 2
    out = np.zeros((n, 2), dtype=complex)
    out[cidx] = y0
    for direction in (+1, -1):
        y = np.array(y0, dtype=complex)
        j = cidx
        while 0 < j + direction < n or j + direction in (0, n - 1):
            t = t_grid[j]
            hstep = t_grid[j + direction] - t
            k1 = rhs(t, y)
            k2 = rhs(t + hstep / 2, y + hstep / 2 * k1)
            k3 = rhs(t + hstep / 2, y + hstep / 2 * k2)
            k4 = rhs(t + hstep, y + hstep * k3)
            y = y + hstep / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            j += direction
            out[j] = y
            if j in (0, n - 1):
                break
    return out


def evolve_modes(
    fam: CoefficientFamily,
    nu: float,
    T: float,
    n_t: int,
    integrator: str = "auto",
) -> CauchyEvolution:
    """Build the fundamental pair of the mode nu on a uniform grid over [-T, T]."""
    if n_t % 2 == 0:
        raise WindowExceeded("time grid needs an odd node count (t = 0 must be a node)")
    t_grid = np.linspace(-T, T, n_t)
    h0 = float(np.real(fam.h.at_real(0.0)))
    w_sigma = float(np.sqrt(h0))
    if integrator == "auto":
        integrator = "closed_form" if fam.is_stationary() else "rk4"
    if integrator == "closed_form":
        if not fam.is_stationary():
            raise CflViolation("closed-form path needs stationary coefficients")
        N0 = float(np.real(fam.N.at_real(0.0)))
        w0 = float(np.real(fam.w.at_real(0.0)))
        omega = lorentzian_frequency(fam, nu)
        twist = np.exp(1j * nu * w0 * t_grid)
        if omega > 0:
            c = twist * np.cos(omega * t_grid)
            s = twist * N0 * np.sin(omega * t_grid) / omega
        else:
            c = twist.copy()
            s = twist * N0 * t_grid
        # momenta v = h^{1/2} D u from the closed forms
        rt = np.sqrt(h0)
        v_c = -rt * np.sin(omega * t_grid) * omega / N0 * twist if omega > 0 else np.zeros_like(c)
        v_s = rt * np.cos(omega * t_grid) * twist
        return CauchyEvolution(
            fam, nu, T, t_grid, c, s, v_c, v_s, "closed_form", w_sigma, omega
        )
    if integrator != "rk4":
        raise ValueError(f"unknown integrator {integrator!r}")
    dt = float(t_grid[1] - t_grid[0])
    Nmax = float(np.max(np.real(fam.N.at_real(t_grid))))
    hmin = float(np.min(np.real(fam.h.at_real(t_grid))))
    mumax = float(np.max(np.abs(fam.mu.at_real(t_grid))))
    om_bound = Nmax * np.sqrt(nu * nu / hmin + mumax)
    if dt * om_bound > 1.0:
        raise CflViolation(
            f"dt * omega_max = {dt * om_bound:.3f} > 1: refine the time grid"
        )
    yc = _rk4_march(fam, nu, t_grid, np.array([1.0, 0.0], dtype=complex))
    ys = _rk4_march(fam, nu, t_grid, np.array([0.0, w_sigma], dtype=complex))
    omega = lorentzian_frequency(fam, nu) if fam.is_stationary() else None
    return CauchyEvolution(
        fam, nu, T, t_grid,
        yc[:, 0], ys[:, 0], yc[:, 1], ys[:, 1],
        "rk4", w_sigma, omega,
    )


def causal_propagator(evo: CauchyEvolution, t1: float, t2: float) -> complex:
    """G(t1, t2) = [s(t1) conj(c(t2)) - c(t1) conj(s(t2))] / w_sigma per mode."""
    j1, j2 = evo.node(t1), evo.node(t2)
    val = evo.s[j1] * np.conj(evo.c[j2]) - evo.c[j1] * np.conj(evo.s[j2])
    return complex(val / evo.w_sigma)


def propagator_kernel(evo: CauchyEvolution) -> np.ndarray:
    """The full (n_t, n_t) causal propagator kernel on the grid."""
    val = np.outer(evo.s, np.conj(evo.c)) - np.outer(evo.c, np.conj(evo.s))
    return val / evo.w_sigma


def uqu_star_kernel(evo: CauchyEvolution) -> np.ndarray:
    """(U q U*)(t1, t2) = row(t1) q row(t2)^dagger / w_sigma on the grid."""
    rows = evo.rows()
    q = np.array([[0.0, 1.0], [1.0, 0.0]])
    return rows @ q @ rows.conj().T / evo.w_sigma


def verify_ccr(evo: CauchyEvolution) -> float:
    """Max-norm residual of U q U* = i G over the (t1, t2) grid."""
    lhs = uqu_star_kernel(evo)
    rhs = 1j * propagator_kernel(evo)
    scale = max(np.max(np.abs(rhs)), 1e-300)
    return float(np.max(np.abs(lhs - rhs)) / scale)


def causal_propagator_direct(
    fam: CoefficientFamily, nu: float, t1: float, t2: float, n_steps: int = 256
) -> complex:
    """G(t1, t2) by direct evolution of the jump data from t2.

    The retarded-minus-advanced difference is the unique solution of the mode
    equation vanishing at t2 with unit momentum, v(t2) = h^{1/2} D u (t2) = 1
    (the value forced by the conserved pairing of the fundamental system), so
    marching that Cauchy problem from t2 to t1 gives G independently of the
    fundamental pair anchored at t = 0.  Second leg of the dual-path CCR check.
    """
    if abs(t1 - t2) < 1e-300:
        return 0.0
    grid = np.linspace(t2, t1, n_steps + 1)
    # a grid symmetric about t2 lets _rk4_march start there; only the
    # forward half (ending at t1) is kept
    full = np.concatenate([2 * grid[0] - grid[::-1][:-1], grid])
    y = _rk4_march(fam, nu, full, np.array([0.0, 1.0], dtype=complex))
    return complex(y[-1, 0])


def verify_ccr_dual(evo: CauchyEvolution, pairs=None, n_steps: int = 256) -> float:
    """Residual of U q U* = i G with G from independent direct evolutions.

    Unlike verify_ccr (which is algebraically tight), both legs here carry
    integrator error, so the residual measures the RK4 order on non-static
    backgrounds.
    """
    if pairs is None:
        T = evo.T
        tg = evo.t_grid

        def snap(x):
            return float(tg[int(np.argmin(np.abs(tg - x)))])

        pairs = [
            (snap(-0.75 * T), snap(0.5 * T)),
            (snap(0.25 * T), snap(-0.625 * T)),
            (T, -T),
            (snap(0.5 * T), snap(0.125 * T)),
        ]
    worst = 0.0
    for t1, t2 in pairs:
        lhs = causal_propagator(evo, t1, t2)
        rhs = causal_propagator_direct(evo.fam, evo.nu, t1, t2, n_steps=n_steps)
        worst = max(worst, abs(lhs - rhs))
    return worst


def time_reversal_defect(evo: CauchyEvolution) -> float:
    """Forward-then-backward reconstruction error of random Cauchy data.

    The pair (c, s) determines the propagator matrix from 0 to t; its inverse
    is the propagator from t to 0, and the product must be the identity.
    Conservation of the conjugated pairing gives the inverse in closed form,
    so the defect measures exactly the integrator's symplectic error.
    """
    rng = np.random.default_rng(7)
    f = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    worst = 0.0
    for j in (0, len(evo.t_grid) - 1, len(evo.t_grid) // 4):
        M = np.array(
            [[evo.c[j], evo.s[j]], [evo.v_c[j], evo.v_s[j]]], dtype=complex
        )
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        Minv = np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / det
        back = Minv @ (M @ f)
        worst = max(worst, float(np.max(np.abs(back - f)) / np.max(np.abs(f))))
    return worst
