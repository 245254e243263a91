"""Two-point functions Lambda+- = +-U C+- q U* and their state properties.

Per mode the kernels are rank <= 2,

    Lambda+-(t1, t2) = +- row(t1) (C+- q) row(t2)^dagger / w_sigma,
    row(t) = (c(t), i s(t)),

with (c, s) the normalized fundamental pair of the Cauchy evolution and C+-
the per-mode Calderon matrices of the Euclidean inverse.  The structural
properties verified here:

  positivity      Re <phi, Lambda+- phi> >= 0 over test functions,
  bisolution      P Lambda = Lambda P = 0 in both time arguments,
  commutator      Lambda+ - Lambda- = i G with G the causal propagator,
  hermiticity     Lambda(t1, t2) = conj(Lambda(t2, t1)).

For the periodic (thermal) inverse at inverse temperature beta the kernels
are KMS states: continuing Lambda+ by +i beta in the time difference gives
Lambda-.  The continuation is checked along two routes, a closed-form
continuation of the kernel fitted to its two characteristic frequencies, and
the harmonic strip continuation of the wick module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModeMismatch, NotStationary
from .lorentzian import CauchyEvolution, propagator_kernel

_Q = np.array([[0.0, 1.0], [1.0, 0.0]])


@dataclass
class TwoPointKernel:
    """One mode of Lambda+ or Lambda- sampled on the evolution t-grid."""

    sign: int                 # +1 or -1
    nu: float
    t_grid: np.ndarray
    values: np.ndarray        # (n_t, n_t) complex
    evo: CauchyEvolution

    def hermiticity_defect(self) -> float:
        scale = max(np.max(np.abs(self.values)), 1e-300)
        return float(np.max(np.abs(self.values - self.values.conj().T)) / scale)


def assemble_two_point(
    cal: np.ndarray, evo: CauchyEvolution, sign: int, nu: float | None = None
) -> TwoPointKernel:
    """Lambda+- from a per-mode Calderon matrix and a Cauchy evolution."""
    cal = np.asarray(cal, dtype=complex)
    if cal.shape != (2, 2):
        raise ModeMismatch(f"Calderon matrix has shape {cal.shape}, expected (2, 2)")
    if nu is not None and abs(nu - evo.nu) > 1e-12:
        raise ModeMismatch(f"Calderon mode {nu} != evolution mode {evo.nu}")
    rows = evo.rows()
    values = float(sign) * rows @ (cal @ _Q) @ rows.conj().T / evo.w_sigma
    return TwoPointKernel(int(np.sign(sign)), evo.nu, evo.t_grid, values, evo)


def _mode_operator_apply(evo: CauchyEvolution, U: np.ndarray) -> np.ndarray:
    """Apply the mode operator P along the first axis of U by 5-point stencils.

    Uses the first-order (momentum) form so only the coefficient values are
    needed, never their time derivatives.  The two nodes nearest each grid end
    are dropped from the result (set to zero) to keep one-sided stencils out
    of the residual.
    """
    t = evo.t_grid
    dt = evo.dt
    fam = evo.fam
    N = np.real(fam.N.at_real(t))[:, None]
    h = np.real(fam.h.at_real(t))[:, None]
    w = np.real(fam.w.at_real(t))[:, None]
    mu = np.real(fam.mu.at_real(t))[:, None]
    nu = evo.nu
    rho = N * np.sqrt(h)

    def d5(F):
        out = np.zeros_like(F)
        out[2:-2] = (F[:-4] - 8 * F[1:-3] + 8 * F[3:-1] - F[4:]) / (12 * dt)
        return out

    du = d5(U)
    v = (np.sqrt(h) / N) * (du - 1j * nu * w * U)
    res = d5(v) / rho - 1j * nu * (w / (N * np.sqrt(h))) * v + (nu * nu / h + mu) * U
    res[:4] = 0.0
    res[-4:] = 0.0
    return res


@dataclass
class StateReport:
    """Residuals of the Prop.-style state properties for one mode pair."""

    positivity_min: float
    bisolution_res: float
    ccr_res: float
    hermiticity_res: float

    def __str__(self):
        return (
            f"positivity_min={self.positivity_min:.3e} "
            f"bisolution={self.bisolution_res:.3e} "
            f"ccr={self.ccr_res:.3e} herm={self.hermiticity_res:.3e}"
        )


def verify_state_properties(
    lam_p: TwoPointKernel, lam_m: TwoPointKernel, n_test: int = 64
) -> StateReport:
    """Check positivity, bisolution, commutator and hermiticity residuals.

    Positivity is the smallest eigenvalue of the Hermitian part of the Gram
    matrix <phi_a, Lambda phi_b> over a basis mixing smooth bumps and seeded
    random vectors, normalized by the largest Gram eigenvalue; both signs are
    combined.
    """
    evo = lam_p.evo
    t = evo.t_grid
    n = len(t)
    w = np.full(n, evo.dt)
    w[0] *= 0.5
    w[-1] *= 0.5
    wq = w * evo.rho_g

    rng = np.random.default_rng(11)
    basis = []
    for j in range(min(n_test // 2, 16)):
        center = t[0] + (j + 1) * (t[-1] - t[0]) / (min(n_test // 2, 16) + 1)
        width = (t[-1] - t[0]) / 6.0
        basis.append(np.exp(-((t - center) ** 2) / (2 * width**2)) * np.exp(1j * j * t))
    for _ in range(n_test - len(basis)):
        basis.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    B = np.stack(basis, axis=1)          # (n, m)
    BW = B * wq[:, None]

    pos_min = np.inf
    for lam in (lam_p, lam_m):
        gram = BW.conj().T @ lam.values @ BW
        gram = 0.5 * (gram + gram.conj().T)
        ev = np.linalg.eigvalsh(gram)
        scale = max(np.max(np.abs(ev)), 1e-300)
        pos_min = min(pos_min, float(np.min(ev) / scale))

    # the natural size of the terms of P applied to the kernel is f^2 times
    # the kernel itself, f the peak mode frequency; the bisolution residual
    # is reported relative to that size
    fam = evo.fam
    N = np.real(fam.N.at_real(t))
    h = np.real(fam.h.at_real(t))
    wf = np.real(fam.w.at_real(t))
    mu = np.real(fam.mu.at_real(t))
    nu = evo.nu
    fmax = float(np.max(N * np.sqrt(nu * nu / h + np.abs(mu))) + np.max(np.abs(nu * wf)))
    bis = 0.0
    for lam in (lam_p, lam_m):
        scale = max(np.max(np.abs(lam.values)), 1e-300) * (1.0 + fmax * fmax)
        r1 = _mode_operator_apply(evo, lam.values)
        r2 = _mode_operator_apply(evo, lam.values.conj().T)
        bis = max(bis, float(np.max(np.abs(r1)) / scale), float(np.max(np.abs(r2)) / scale))

    G = propagator_kernel(evo)
    scale = max(np.max(np.abs(G)), 1e-300)
    ccr = float(np.max(np.abs(lam_p.values - lam_m.values - 1j * G)) / scale)

    herm = max(lam_p.hermiticity_defect(), lam_m.hermiticity_defect())
    return StateReport(pos_min, bis, ccr, herm)


def thermal_mode_oracle(omega: float, beta: float, t1, t2):
    """cosh(omega(beta/2 + i(t1 - t2))) / (2 omega sinh(omega beta / 2)).

    The unique mode two-point function that is beta-periodic in imaginary
    time.  For omega*beta > 700 the hyperbolic functions overflow and the
    asymptotic vacuum form e^{i omega (t1 - t2)} / (2 omega) is substituted
    (relative error O(e^{-beta omega})).
    """
    if omega <= 0 or beta <= 0:
        raise ValueError("thermal oracle needs omega > 0 and beta > 0")
    dt = np.asarray(t1) - np.asarray(t2)
    if omega * beta > 700.0:
        return np.exp(1j * omega * dt) / (2.0 * omega)
    return np.cosh(omega * (beta / 2.0 + 1j * dt)) / (
        2.0 * omega * np.sinh(omega * beta / 2.0)
    )


def _fit_two_frequency(lam: TwoPointKernel):
    """Coefficients (A, B) of Lambda(t1, t2) = e^{i nu w0 (t1 - t2)} x
    [A e^{i omega (t1-t2)} + B e^{-i omega (t1-t2)}], stationary scenarios.

    Least-squares over the first kernel row; the basis frequencies are the
    characteristic frequencies nu w0 +- omega of the mode.
    """
    evo = lam.evo
    if evo.omega is None or not evo.fam.is_stationary():
        raise NotStationary("two-frequency fit needs stationary coefficients")
    w0 = float(np.real(evo.fam.w.at_real(0.0)))
    nu, om = evo.nu, evo.omega
    j0 = evo.node(0.0)
    col = lam.values[:, j0]
    d = lam.t_grid
    M = np.stack(
        [np.exp(1j * (nu * w0 + om) * d), np.exp(1j * (nu * w0 - om) * d)], axis=1
    )
    coeff, *_ = np.linalg.lstsq(M, col, rcond=None)
    # rounding-level coefficients must vanish exactly: continuation
    # amplifies them by e^{omega L} on the Euclidean side
    cut = 1e-12 * np.max(np.abs(coeff))
    coeff = np.where(np.abs(coeff) < cut, 0.0, coeff)
    return complex(coeff[0]), complex(coeff[1])


def continue_fitted(lam: TwoPointKernel, shift: complex) -> np.ndarray:
    """Evaluate the fitted analytic mode kernel at difference t1 - t2 + shift."""
    A, B = _fit_two_frequency(lam)
    evo = lam.evo
    w0 = float(np.real(evo.fam.w.at_real(0.0)))
    nu, om = evo.nu, evo.omega
    d = lam.t_grid[:, None] - lam.t_grid[None, :] + shift
    return A * np.exp(1j * (nu * w0 + om) * d) + B * np.exp(1j * (nu * w0 - om) * d)


@dataclass
class KmsReport:
    """Residuals of the KMS continuation identity for one mode."""

    residual_closed: float    # fitted closed-form continuation path
    residual_strip: float     # harmonic strip continuation path
    strip_points: int
    strip_method: str = "fd2"

    def __str__(self):
        return (
            f"kms closed={self.residual_closed:.3e} "
            f"strip={self.residual_strip:.3e} "
            f"(n={self.strip_points}, {self.strip_method})"
        )


def verify_kms(
    lam_p: TwoPointKernel,
    lam_m: TwoPointKernel,
    beta: float,
    strip_n: int = 201,
) -> KmsReport:
    """Check Lambda+(t1 + i beta, t2) = Lambda-(t1, t2) along two routes.

    (a) continue the two-frequency fit of Lambda+ by +i beta in the time
        difference and compare against the assembled Lambda-;
    (b) continue the Lambda+ boundary row across the Euclidean strip of width
        beta by the one-sided harmonic marching of the wick module and compare
        the far edge against the Lambda- row.

    Both residuals are normalized by the conditioning of the continuation:
    translating by i beta multiplies the frequency-lambda component by
    e^{-lambda beta}, so boundary data of size M carries an irreducible
    continued uncertainty of order eps * M * e^{|lambda| beta}.  Beyond
    lambda beta ~ 36 the Boltzmann-suppressed coefficient is below round-off
    in the sampled kernel and no double-precision route can resolve it; the
    backward-error residual (relative to the amplification factor) is the
    meaningful figure for every mode.  The marching path uses the fd2
    recurrence where it resolves the tolerance (lambda beta <= 8) and the
    per-bin exact factor beyond that, where the fd2 truncation error
    (growing like lambda^4 e^{lambda beta} h^2) would dominate.

    Requires the thermal (periodic beta) inverse and stationary coefficients.
    """
    from . import wick

    evo = lam_p.evo
    if not evo.fam.is_stationary():
        raise NotStationary("KMS continuation needs stationary coefficients")
    w0 = float(np.real(evo.fam.w.at_real(0.0)))
    lam_max = max(abs(evo.nu * w0 + evo.omega), abs(evo.nu * w0 - evo.omega))
    amp = float(np.exp(beta * lam_max))
    cont = continue_fitted(lam_p, 1j * beta)
    scale = max(
        amp * np.max(np.abs(lam_p.values)), np.max(np.abs(lam_m.values)), 1e-300
    )
    res_a = float(np.max(np.abs(cont - lam_m.values)) / scale)

    # (b) one-sided strip march of the t2 = 0 rows; the trailing grid node
    # duplicates the leading one over the FFT period 2T and is dropped
    j0 = evo.node(0.0)
    top = lam_p.values[:-1, j0]
    bottom_exact = lam_m.values[:-1, j0]
    method = "fd2" if beta * lam_max <= 8.0 else "exact"
    strip = wick.harmonic_strip_march(
        top, lam_p.t_grid[:-1], beta, strip_n, method=method
    )
    scale_b = max(
        amp * np.max(np.abs(top)), np.max(np.abs(bottom_exact)), 1e-300
    )
    res_b = float(np.max(np.abs(strip.values[-1] - bottom_exact)) / scale_b)
    return KmsReport(res_a, res_b, strip_n, method)
