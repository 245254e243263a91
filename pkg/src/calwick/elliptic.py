"""Discrete per-mode complex Laplacian and its boundary-value solves.

The mode operator

    K_nu u = -rho^-1 (rho p u')' - i nu [ rho^-1 (rho r u)' + r u' ]
             + (nu^2 q + lambda) u

is discretized with second-order centered differences in conservative form:
the flux coefficient rho*p is sampled at half nodes, the first-order terms
use centered differences of (rho r u) and of u.  Two boundary conditions are
supported: a Dirichlet slab u(+-L) = 0 and a periodic circle of length beta
(with no node on the seam, so the interface s = 0 stays a grid node and the
grid is reflection symmetric).

The quadrature weight for (v|u) = int conj(v) u |k|^{1/2} ds is W = diag(rho_j h);
with it the discrete operator satisfies the same adjoint relation as the
continuum one, K^dagger W = W kappa K kappa, up to rounding, which
adjoint_residual measures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    GridAsymmetry,
    GridTooCoarse,
    RegionMismatch,
    SingularSystem,
)
from .families import CoefficientFamily
from .geometry import Involution
from .modes import ModeReduction

_MIN_POINTS_PER_UNIT = 8


def slab_grid(L: float, n_s: int) -> np.ndarray:
    """Uniform grid on [-L, L] with n_s nodes, n_s odd so s = 0 is a node."""
    if n_s % 2 == 0:
        raise GridAsymmetry("slab grid needs an odd node count")
    return np.linspace(-L, L, n_s)


def periodic_grid(beta: float, n_s: int) -> np.ndarray:
    """Uniform grid on the circle of length beta, n_s odd, seam between nodes.

    Nodes s_j = (j - (n_s-1)/2) * beta/n_s cover (-beta/2, beta/2); s = 0 is
    the center node and the set is symmetric under s -> -s.
    """
    if n_s % 2 == 0:
        raise GridAsymmetry("periodic grid needs an odd node count")
    h = beta / n_s
    return (np.arange(n_s) - (n_s - 1) / 2.0) * h


@dataclass
class DiscreteEllipticSystem:
    """Assembled per-mode operator with grid, weights and solver state."""

    red: ModeReduction
    nu: float
    bc: str                      # "dirichlet" | "periodic"
    extent: float                # L for the slab, beta for the circle
    s_grid: np.ndarray           # all nodes, including constrained ones
    h: float
    matrix: sp.csr_matrix        # operator over the unknown nodes
    unknowns: np.ndarray         # indices of s_grid carried by the matrix
    rho: np.ndarray              # rho at all nodes (real)
    _lu: object = field(default=None, repr=False)

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights rho_j h of dmu_k at the unknown nodes."""
        return self.rho[self.unknowns] * self.h

    @property
    def center(self) -> int:
        j = int(np.argmin(np.abs(self.s_grid)))
        if abs(self.s_grid[j]) > 1e-12:
            raise GridAsymmetry("no node at s = 0")
        return j

    def factorize(self):
        if self._lu is None:
            try:
                self._lu = spla.splu(self.matrix.tocsc())
            except RuntimeError as exc:
                raise SingularSystem(f"LU factorization failed: {exc}") from exc
            self._check_invertible()
        return self._lu

    def _check_invertible(self):
        """Inverse-power probe for a near-null vector."""
        rng = np.random.default_rng(0)
        n = self.matrix.shape[0]
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        scale = spla.norm(self.matrix, np.inf)
        for _ in range(2):
            w = self._lu.solve(v)
            amp = np.linalg.norm(w)
            v = w / amp
        if amp * scale > 1e13:
            self._lu = None
            raise SingularSystem(
                f"system numerically singular (amplification {amp:.3e})",
                near_null=v,
            )

    def apply(self, u_full: np.ndarray) -> np.ndarray:
        """Apply the operator to a full-grid field; returns unknown-node values."""
        return self.matrix @ np.asarray(u_full, dtype=complex)[self.unknowns]

    def embed(self, u_unknown: np.ndarray) -> np.ndarray:
        """Zero-extend unknown-node values to the full grid (Dirichlet ends)."""
        full = np.zeros(len(self.s_grid), dtype=complex)
        full[self.unknowns] = u_unknown
        return full


def assemble_K(
    fam: CoefficientFamily,
    nu: float,
    bc: str,
    extent: float,
    n_s: int,
) -> DiscreteEllipticSystem:
    """Assemble the divergence-form mode operator on the requested grid."""
    red = ModeReduction(fam)
    if bc == "dirichlet":
        s = slab_grid(extent, n_s)
        length = 2.0 * extent
    elif bc == "periodic":
        s = periodic_grid(extent, n_s)
        length = extent
    else:
        raise ValueError(f"unknown bc {bc!r}")
    if n_s / length < _MIN_POINTS_PER_UNIT:
        raise GridTooCoarse(
            f"{n_s} nodes over length {length}: fewer than "
            f"{_MIN_POINTS_PER_UNIT} points per s-unit"
        )
    h = float(s[1] - s[0])
    rho_all = np.real(red.rho(s))

    if bc == "dirichlet":
        unknowns = np.arange(1, n_s - 1)
        left = s[unknowns] - h
        right = s[unknowns] + h
        wrap = False
    else:
        unknowns = np.arange(n_s)
        left = s - h
        right = s + h
        wrap = True
    sj = s[unknowns]
    n = len(unknowns)

    rho_j = red.rho(sj)
    rp_plus = red.rho(sj + h / 2) * red.p(sj + h / 2)
    rp_minus = red.rho(sj - h / 2) * red.p(sj - h / 2)
    rr_right = red.rho(right) * red.r_c(right)
    rr_left = red.rho(left) * red.r_c(left)
    r_j = red.r_c(sj)
    pot = red.potential(sj, nu)

    lower = -rp_minus / (rho_j * h * h) + 1j * nu * (rr_left / rho_j + r_j) / (2 * h)
    upper = -rp_plus / (rho_j * h * h) - 1j * nu * (rr_right / rho_j + r_j) / (2 * h)
    diag = (rp_plus + rp_minus) / (rho_j * h * h) + pot

    rows, cols, vals = [], [], []
    for j in range(n):
        rows.append(j)
        cols.append(j)
        vals.append(diag[j])
        jm, jp = j - 1, j + 1
        if wrap:
            jm %= n
            jp %= n
        if 0 <= jm:
            rows.append(j)
            cols.append(jm)
            vals.append(lower[j])
        if jp < n:
            rows.append(j)
            cols.append(jp)
            vals.append(upper[j])
    matrix = sp.csr_matrix(
        (np.array(vals, dtype=complex), (rows, cols)), shape=(n, n)
    )
    return DiscreteEllipticSystem(
        red=red,
        nu=nu,
        bc=bc,
        extent=extent,
        s_grid=s,
        h=h,
        matrix=matrix,
        unknowns=unknowns,
        rho=rho_all,
    )


def solve(sys: DiscreteEllipticSystem, rhs: np.ndarray) -> np.ndarray:
    """Solve K u = rhs; rhs given on the full grid, result on the full grid.

    Dirichlet boundary values of the result are exactly zero; rhs values at
    constrained nodes are ignored.
    """
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.shape != sys.s_grid.shape:
        raise RegionMismatch("rhs grid does not match the system grid")
    lu = sys.factorize()
    u = lu.solve(rhs[sys.unknowns])
    return sys.embed(u)


def delta_rhs(sys: DiscreteEllipticSystem, j: int) -> np.ndarray:
    """Discrete delta source at node j, normalized against dmu_k.

    K G = delta(s - s_j) / rho pointwise, so the nodal rhs is
    e_j / (rho_j h); the resulting solve approximates the Green column.
    """
    rhs = np.zeros(len(sys.s_grid), dtype=complex)
    rhs[j] = 1.0 / (sys.rho[j] * sys.h)
    return rhs


def eta_form(sys: DiscreteEllipticSystem, v: np.ndarray, u: np.ndarray, side: int) -> complex:
    """The quadratic form 2 int_{Omega+-} (grad(conj v) . Re k^-1 . grad u
    + Re(lambda) conj(v) u) dmu, per mode, by midpoint quadrature.

    side = +1 integrates over (0, extent-edge), side = -1 over the mirror.
    Fields are full-grid arrays; only the closed half region enters.
    """
    v = np.asarray(v, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if v.shape != sys.s_grid.shape or u.shape != sys.s_grid.shape:
        raise RegionMismatch("fields do not live on the system grid")
    c = sys.center
    if side > 0:
        idx = np.arange(c, len(sys.s_grid))
    else:
        idx = np.arange(0, c + 1)
    sv, uv, vv = sys.s_grid[idx], u[idx], v[idx]
    mid = (sv[1:] + sv[:-1]) / 2.0
    du = (uv[1:] - uv[:-1]) / sys.h
    dv = (vv[1:] - vv[:-1]) / sys.h
    um = (uv[1:] + uv[:-1]) / 2.0
    vm = (vv[1:] + vv[:-1]) / 2.0
    red = sys.red
    nu = sys.nu
    p_m = np.real(red.p(mid))
    r_m = np.real(red.r_c(mid))
    q_m = np.real(red.q_tilde(mid))
    lam_m = np.real(red.lam(mid))
    rho_m = np.real(red.rho(mid))
    grad = (
        p_m * np.conj(dv) * du
        + r_m * (np.conj(dv) * (1j * nu * um) + np.conj(1j * nu * vm) * du)
        + q_m * nu * nu * np.conj(vm) * um
    )
    integrand = grad + lam_m * np.conj(vm) * um
    return complex(2.0 * np.sum(integrand * rho_m) * sys.h)


def adjoint_residual(sys: DiscreteEllipticSystem) -> float:
    """|| M^dagger W - W (kappa M kappa) || / ||M|| in the max norm.

    kappa acts by the grid reflection permutation; W = diag(rho_j h).  The
    continuum relation K* = kappa K kappa descends to the discrete operator
    because the reflected coefficient values are the complex conjugates of
    the originals (reality condition) and rho is even.
    """
    s_un = sys.s_grid[sys.unknowns]
    inv = Involution(s_un, periodic=(sys.bc == "periodic"), period=sys.extent)
    P = inv.index_map
    M = sys.matrix.toarray()
    W = np.diag(sys.weights)
    kMk = M[np.ix_(P, P)]
    resid = M.conj().T @ W - W @ kMk
    scale = np.max(np.abs(M))
    return float(np.max(np.abs(resid)) / scale)


def solve_residual(sys: DiscreteEllipticSystem, u: np.ndarray, rhs: np.ndarray) -> float:
    """Relative interior residual ||K u - rhs||_inf / ||rhs||_inf."""
    r = sys.apply(u) - np.asarray(rhs, dtype=complex)[sys.unknowns]
    denom = np.max(np.abs(rhs))
    return float(np.max(np.abs(r)) / denom) if denom > 0 else float(np.max(np.abs(r)))
