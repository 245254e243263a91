"""Boundary apparatus and Calderon operators at the interface s = 0.

Per Fourier mode a boundary datum is a pair f = (f0, f1): the value trace
and the conormal-derivative trace n^a grad_a u at s = 0, with the conormal

    n = -(k^ss, k^ys) / sqrt(k^ss),     n . k . n = 1,  Re n_s < 0,

outward from Omega^+ = {s > 0}.  The boundary operators are

    q = [[0, 1], [1, 0]],   S = [[2i b*, -1], [1, 0]],  I = [[1, 0], [2i b, -1]],

with b the tangential-imaginary part of the conormal derivative; per mode b
acts as multiplication by i nu w(0)/N(0).  The Calderon operators are
C_+- = -+ gamma_+- K^-1 gamma* S, computed here on two paths:

  * a reference path through the semi-analytic mode solutions
    (module reference), exact to round-off;
  * a grid path through the finite-difference solve: gamma* is the exact
    discrete adjoint of the two-sided trace, and gamma_+- are one-sided
    extrapolated traces taken a few nodes away from the source layer, so
    they see the clean one-sided limits of the layer potential.  This path
    carries the O(h^2) truncation error of the operator and is the one the
    convergence studies refine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CutoffViolation, DegenerateNormal, GridTooCoarse, RegionMismatch
from .families import CoefficientFamily
from .geometry import Involution
from .modes import ModeReduction
from . import elliptic
from . import reference as refmod

Q_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def compute_normal(fam: CoefficientFamily) -> tuple[complex, complex]:
    """Conormal n = -(k^ss, k^ys)/sqrt(k^ss) at s = 0, checked against the
    normalization n.k.n = 1 and the orientation Re n_s < 0."""
    red = ModeReduction(fam)
    z = np.zeros(1)
    p0 = complex(red.p(z)[0])
    if abs(p0) < 1e-14:
        raise DegenerateNormal("k^ss vanishes at the interface")
    n_s, n_y = red.normal()
    # n.k.n with k = [[k_ss, k_sy], [k_sy, k_yy]] at s=0
    N0 = complex(fam.N.at_imag(0.0))
    h0 = complex(fam.h.at_imag(0.0))
    w0 = complex(fam.w.at_imag(0.0))
    k = np.array([[N0 * N0 - h0 * w0 * w0, 1j * h0 * w0], [1j * h0 * w0, h0]])
    nvec = np.array([n_s, n_y])
    norm = nvec @ k @ nvec
    assert abs(norm - 1.0) < 1e-12, f"n.k.n = {norm}"
    assert n_s.real < 0.0, "Re n_s must point out of Omega+"
    return n_s, n_y


@dataclass(frozen=True)
class BoundaryMatrixSet:
    """Per-mode boundary operators b, b*, q, S, I and S^-1."""

    b: complex
    b_star: complex
    q: np.ndarray
    S: np.ndarray
    I: np.ndarray
    S_inv: np.ndarray

    def identity_defect(self) -> float:
        """max norm of I* S + q (should vanish: I*S = -q)."""
        r1 = self.I.conj().T @ self.S + self.q
        r2 = self.S @ self.S_inv - np.eye(2)
        return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


def build_boundary_operators(fam: CoefficientFamily, nu: float) -> BoundaryMatrixSet:
    red = ModeReduction(fam)
    b = red.boundary_symbol(nu)
    bs = np.conj(b)
    S = np.array([[2j * bs, -1.0], [1.0, 0.0]], dtype=complex)
    I = np.array([[1.0, 0.0], [2j * b, -1.0]], dtype=complex)
    S_inv = np.array([[0.0, 1.0], [-1.0, 2j * bs]], dtype=complex)
    return BoundaryMatrixSet(b=b, b_star=bs, q=Q_MATRIX.copy(), S=S, I=I, S_inv=S_inv)


def trace(sys: elliptic.DiscreteEllipticSystem, u: np.ndarray, side: int) -> np.ndarray:
    """One-sided trace (u(0), n^a grad_a u(0)) with 3-point stencils."""
    u = np.asarray(u, dtype=complex)
    c = sys.center
    h = sys.h
    n = len(sys.s_grid)
    if (side > 0 and c + 2 >= n) or (side < 0 and c - 2 < 0):
        raise GridTooCoarse("need at least 3 nodes on the trace side")
    if side > 0:
        du = (-3.0 * u[c] + 4.0 * u[c + 1] - u[c + 2]) / (2.0 * h)
    else:
        du = (3.0 * u[c] - 4.0 * u[c - 1] + u[c - 2]) / (2.0 * h)
    n_s, n_y = sys.red.normal()
    return np.array([u[c], n_s * du + 1j * sys.nu * n_y * u[c]])


def _offset_trace(sys: elliptic.DiscreteEllipticSystem, u: np.ndarray, side: int) -> np.ndarray:
    """One-sided trace extrapolated from nodes 3h..5h away from s = 0.

    Used on layer-potential solves, whose grid values inside the discrete
    source stencil (|s| <= 2h) do not represent either one-sided limit.
    """
    u = np.asarray(u, dtype=complex)
    c = sys.center
    h = sys.h
    sgn = 1 if side > 0 else -1
    u3, u4, u5 = u[c + 3 * sgn], u[c + 4 * sgn], u[c + 5 * sgn]
    val = 10.0 * u3 - 15.0 * u4 + 6.0 * u5
    du = sgn * (-4.5 * u3 + 8.0 * u4 - 3.5 * u5) / h
    n_s, n_y = sys.red.normal()
    return np.array([val, n_s * du + 1j * sys.nu * n_y * val])


def two_sided_trace_rows(sys: elliptic.DiscreteEllipticSystem) -> np.ndarray:
    """Matrix of the two-sided trace gamma over the unknown nodes (2 x n).

    The derivative row averages the one-sided 3-point stencils, keeping the
    full operator second-order and kappa-antisymmetric.
    """
    n = len(sys.unknowns)
    c_full = sys.center
    c = int(np.where(sys.unknowns == c_full)[0][0])
    h = sys.h
    rows = np.zeros((2, n), dtype=complex)
    rows[0, c] = 1.0
    dplus = np.zeros(n)
    dplus[c] += -3.0
    dplus[c + 1] += 4.0
    dplus[c + 2] += -1.0
    dminus = np.zeros(n)
    dminus[c] += 3.0
    dminus[c - 1] += -4.0
    dminus[c - 2] += 1.0
    dcent = (dplus + dminus) / (2.0 * 2.0 * h)
    n_s, n_y = sys.red.normal()
    rows[1, :] = n_s * dcent
    rows[1, c] += 1j * sys.nu * n_y
    return rows


def trace_adjoint(sys: elliptic.DiscreteEllipticSystem, f: np.ndarray) -> np.ndarray:
    """gamma* f: the exact discrete adjoint of the two-sided trace.

    Defined by (gamma* f | v)_{dmu} = (f | gamma v)_{dsigma} for all grid
    fields v, i.e. r = W^-1 Gamma^dagger w_sigma f; supported on the five
    nodes around s = 0.  Returns a full-grid rhs vector.
    """
    rows = two_sided_trace_rows(sys)
    w_sigma = sys.red.boundary_weight()
    r = rows.conj().T @ (w_sigma * np.asarray(f, dtype=complex))
    r /= sys.weights
    return sys.embed(r)


def calderon_operator(
    sys: elliptic.DiscreteEllipticSystem, side: int, ops: BoundaryMatrixSet | None = None
) -> np.ndarray:
    """Grid-path Calderon matrix C_+- = -+ gamma_+- K^-1 gamma* S per mode."""
    if ops is None:
        ops = build_boundary_operators(sys.red.fam, sys.nu)
    out = np.zeros((2, 2), dtype=complex)
    sgn = -1.0 if side > 0 else 1.0
    for j in range(2):
        f = np.zeros(2, dtype=complex)
        f[j] = 1.0
        rhs = trace_adjoint(sys, ops.S @ f)
        u = elliptic.solve(sys, rhs)
        out[:, j] = sgn * _offset_trace(sys, u, side)
    return out


def reflection_rhs_operator(sys: elliptic.DiscreteEllipticSystem) -> np.ndarray:
    """Grid path of gamma+ K^-1 kappa gamma* (right side of C+ q = ...)."""
    inv = Involution(
        sys.s_grid, periodic=(sys.bc == "periodic"), period=sys.extent
    )
    out = np.zeros((2, 2), dtype=complex)
    for j in range(2):
        f = np.zeros(2, dtype=complex)
        f[j] = 1.0
        rhs = inv(trace_adjoint(sys, f))
        u = elliptic.solve(sys, rhs)
        out[:, j] = _offset_trace(sys, u, +1)
    return out


@dataclass
class IdentityReport:
    """Residuals of the structural Calderon identities for one mode."""

    sum_residual: float          # ||C+ + C- - 1||
    positivity_min: float        # min eigenvalue of Herm part of +-q C+-
    reflection_residual: float   # ||C+ q - gamma+ K^-1 kappa gamma*||
    projection_defect: float     # ||(C+)^2 - C+||


def verify_calderon_identities(
    Cp: np.ndarray, Cm: np.ndarray, reflection_rhs: np.ndarray
) -> IdentityReport:
    sum_res = float(np.max(np.abs(Cp + Cm - np.eye(2))))
    eigs = []
    for sgn, C in ((1.0, Cp), (-1.0, Cm)):
        H = sgn * Q_MATRIX @ C
        H = (H + H.conj().T) / 2.0
        eigs.append(np.linalg.eigvalsh(H).min())
    refl = float(np.max(np.abs(Cp @ Q_MATRIX - reflection_rhs)))
    proj = float(np.max(np.abs(Cp @ Cp - Cp)))
    return IdentityReport(
        sum_residual=sum_res,
        positivity_min=float(min(eigs)),
        reflection_residual=refl,
        projection_defect=proj,
    )


def reference_calderon(fam, nu, bc, extent, side):
    """Reference-path Calderon matrix (round-off accuracy)."""
    ref = refmod.mode_reference(fam, nu, bc, extent)
    return refmod.calderon_matrix(ref, side)


def _half_indices(sys: elliptic.DiscreteEllipticSystem, side: int) -> np.ndarray:
    c = sys.center
    if side > 0:
        return np.arange(c, len(sys.s_grid))
    return np.arange(0, c + 1)


def half_inner(
    sys: elliptic.DiscreteEllipticSystem, v: np.ndarray, u: np.ndarray, side: int
) -> complex:
    """(v|u)_{Omega+-} = int conj(v) u dmu by trapezoid over the half grid."""
    idx = _half_indices(sys, side)
    w = np.real(sys.red.rho(sys.s_grid[idx])) * sys.h
    w = w.copy()
    w[0] *= 0.5
    w[-1] *= 0.5
    return complex(np.sum(np.conj(v[idx]) * u[idx] * w))


def apply_K_full(sys: elliptic.DiscreteEllipticSystem, u: np.ndarray) -> np.ndarray:
    """K u on the full grid (zero at constrained Dirichlet nodes)."""
    return sys.embed(sys.apply(u))


def apply_K_star(sys: elliptic.DiscreteEllipticSystem, v: np.ndarray) -> np.ndarray:
    """K* v = kappa K kappa v on the full grid."""
    inv = Involution(sys.s_grid, periodic=(sys.bc == "periodic"), period=sys.extent)
    return inv(apply_K_full(sys, inv(v)))


def boundary_inner(sys: elliptic.DiscreteEllipticSystem, f: np.ndarray, g: np.ndarray) -> complex:
    """(f|g)_{dOmega} = conj(f).g weighted by the surface density."""
    w_sigma = sys.red.boundary_weight()
    return complex(np.vdot(np.asarray(f), np.asarray(g)) * w_sigma)


def green_identity_check(
    sys: elliptic.DiscreteEllipticSystem,
    u: np.ndarray,
    v: np.ndarray,
    side: int,
    ops: BoundaryMatrixSet | None = None,
) -> tuple[float, float]:
    """Residuals of the two half-region Green identities for smooth fields.

    i)  (v|Ku) - (K*v|u) = +-(gamma_+- v | S gamma_+- u)
    ii) (v|Ku) + (Kv|u)  = eta_+-(v,u) -+ (gamma_+- v | q gamma_+- u)
    """
    if ops is None:
        ops = build_boundary_operators(sys.red.fam, sys.nu)
    Ku = apply_K_full(sys, u)
    Kv = apply_K_full(sys, v)
    Ksv = apply_K_star(sys, v)
    gv = trace(sys, v, side)
    gu = trace(sys, u, side)
    sgn = 1.0 if side > 0 else -1.0
    lhs_i = half_inner(sys, v, Ku, side) - half_inner(sys, Ksv, u, side)
    rhs_i = sgn * boundary_inner(sys, gv, ops.S @ gu)
    lhs_ii = half_inner(sys, v, Ku, side) + half_inner(sys, Kv, u, side)
    rhs_ii = elliptic.eta_form(sys, v, u, side) - sgn * boundary_inner(
        sys, gv, ops.q @ gu
    )
    scale = max(1.0, abs(lhs_i), abs(lhs_ii))
    return abs(lhs_i - rhs_i) / scale, abs(lhs_ii - rhs_ii) / scale


def commutator_apply(
    sys: elliptic.DiscreteEllipticSystem, chi: np.ndarray, u: np.ndarray
) -> np.ndarray:
    """[K, chi] u = K(chi u) - chi K u on the full grid."""
    return apply_K_full(sys, chi * u) - chi * apply_K_full(sys, u)


def cutoff_identity_check(
    sys: elliptic.DiscreteEllipticSystem,
    chi: np.ndarray,
    f: np.ndarray,
    g: np.ndarray,
    ops: BoundaryMatrixSet | None = None,
) -> tuple[float, float]:
    """Residuals of the two cutoff identities for the layer solutions
    u+ = -r+ K^-1 gamma* S f, w+ = -r+ kappa K^-1 gamma* S g.

    A)  (chi C+ f | q chi C+ f) = eta+(chi u+, chi u+) - 2 Re(u+|chi[K,chi]u+)
    B)  (chi C- g | q chi C+ f) = (w+|chi~[K,chi]u+) - (chi[K*,chi~]w+|u+)

    chi is sampled on the grid, must be kappa-symmetric with vanishing
    normal derivative at s = 0.  Identity A requires f0 = 0 for a clean
    grid realization: a nonzero value component makes the layer potential
    jump across the interface, which the single-valued grid field cannot
    represent inside the source stencil, and the eta gradient there is then
    meaningless at any resolution.
    """
    chi = np.asarray(chi, dtype=float)
    if chi.shape != sys.s_grid.shape:
        raise RegionMismatch("cutoff not sampled on the system grid")
    c = sys.center
    dchi = (chi[c + 1] - chi[c - 1]) / (2.0 * sys.h)
    if abs(dchi) > 1e-12:
        raise CutoffViolation(f"normal derivative of chi at s=0 is {dchi:.3e}")
    if ops is None:
        ops = build_boundary_operators(sys.red.fam, sys.nu)
    inv = Involution(sys.s_grid, periodic=(sys.bc == "periodic"), period=sys.extent)
    chi_t = inv(chi)
    u_full = elliptic.solve(sys, trace_adjoint(sys, ops.S @ np.asarray(f, complex)))
    w_full = inv(elliptic.solve(sys, trace_adjoint(sys, ops.S @ np.asarray(g, complex))))
    u_full = -u_full
    w_full = -w_full
    Cp_f = -_offset_trace(sys, u_full, +1)
    # C- g = +gamma- of (-r- K^-1 gamma* S g); recompute from the unreflected solve
    base_g = -elliptic.solve(sys, trace_adjoint(sys, ops.S @ np.asarray(g, complex)))
    Cm_g = _offset_trace(sys, base_g, -1)
    chi0 = chi[c]
    # A)
    lhs_a = boundary_inner(sys, chi0 * Cp_f, ops.q @ (chi0 * Cp_f))
    comm_u = commutator_apply(sys, chi, u_full)
    rhs_a = elliptic.eta_form(sys, chi * u_full, chi * u_full, +1) - 2.0 * np.real(
        half_inner(sys, u_full, chi * comm_u, +1)
    )
    # B)
    lhs_b = boundary_inner(sys, chi0 * Cm_g, ops.q @ (chi0 * Cp_f))
    term1 = half_inner(sys, w_full, chi_t * comm_u, +1)
    comm_star_w = apply_K_star(sys, chi_t * w_full) - chi_t * apply_K_star(sys, w_full)
    term2 = half_inner(sys, chi * comm_star_w, u_full, +1)
    rhs_b = term1 - term2
    scale = max(1.0, abs(lhs_a), abs(lhs_b))
    return abs(lhs_a - rhs_a) / scale, abs(lhs_b - rhs_b) / scale
