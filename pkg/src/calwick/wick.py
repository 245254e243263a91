"""Wick rotation checks: Euclidean kernels, cones, and strip continuation.

In stationary scenarios each mode kernel is a function of the difference
variable alone, and the Euclidean Green function and the Lorentzian
two-point function are boundary values of one holomorphic function F of
zeta = z1 - z2:

    K^-1(s1, s2) = F(i s1 - i s2)   for s1 > 0 > s2,
    Lambda+(t1, t2) = lim F(t1 - t2 + i(s1 - s2)),  (s1, s2) -> 0 in the cone.

F is recovered from the assembled Lambda+ by fitting its two characteristic
frequencies nu w0 +- omega, so both clauses are checked against data that
the elliptic and hyperbolic halves of the package computed independently.

The strip continuation realizes the same analyticity as a boundary value
problem: F restricted to {t + i s : 0 < s < beta} is harmonic, its top edge
carries Lambda+ data and its bottom edge Lambda- data (the KMS relation).
Per temporal FFT frequency the harmonic extension is an explicit
sinh-quotient, which gives an exact spectral solver for the two-row problem
and, for the one-sided problem, a marching scheme seeded by the
Cauchy-Riemann normal derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundaryMismatch,
    CoincidentPoints,
    NonConvergent,
    NotStationary,
)
from .reference import ModeReference
from .twopoint import TwoPointKernel, _fit_two_frequency

_BIN_TOL = 1e-11   # relative FFT amplitude below which a strip bin is dropped


def euclidean_kernel_extract(sys, s1: float, s2: float) -> complex:
    """Per-mode Green value G(s1, s2) by column extraction from the solve.

    Both points must be grid nodes; the column is the solve against the
    normalized delta source at s2.
    """
    from . import elliptic

    g = sys.s_grid
    j1 = int(np.argmin(np.abs(g - s1)))
    j2 = int(np.argmin(np.abs(g - s2)))
    tol = 1e-9 * max(1.0, float(np.max(np.abs(g))))
    if abs(g[j1] - s1) > tol or abs(g[j2] - s2) > tol:
        raise CoincidentPoints(f"({s1}, {s2}) are not both grid nodes")
    if j1 == j2:
        raise CoincidentPoints("kernel column is singular at its source node")
    col = elliptic.solve(sys, elliptic.delta_rhs(sys, j2))
    return complex(col[j1])


@dataclass(frozen=True)
class ContinuationCone:
    """A proper subcone approach sequence for the boundary-value limit.

    The cone is {+-s1 > 0, +-s2 < 0}; the sequence decays geometrically with
    the aspect |s2|/s1 kept inside [1/4, 4].
    """

    sign: int
    pairs: tuple              # ((s1, s2), ...) ordered toward the tip

    def __post_init__(self):
        for s1, s2 in self.pairs:
            if not (self.sign * s1 > 0 > self.sign * s2):
                raise ValueError(f"({s1}, {s2}) outside the open cone")
            aspect = abs(s2) / abs(s1)
            if not (0.25 <= aspect <= 4.0):
                raise ValueError(f"aspect {aspect} outside [1/4, 4]")


def make_cone(sign: int = +1, n: int = 14, start: float = 0.25, decay: float = 0.5) -> ContinuationCone:
    """Geometric approach sequence with cycling aspect ratios in [1/4, 4]."""
    aspects = (1.0, 0.5, 2.0, 0.3, 3.0)
    pairs = []
    scale = start
    for j in range(n):
        s1 = sign * scale
        s2 = -sign * scale * aspects[j % len(aspects)]
        pairs.append((s1, s2))
        scale *= decay
    return ContinuationCone(sign, tuple(pairs))


def fitted_candidate(lam: TwoPointKernel):
    """The holomorphic candidate F(zeta) fitted to a stationary mode kernel."""
    A, B = _fit_two_frequency(lam)
    evo = lam.evo
    w0 = float(np.real(evo.fam.w.at_real(0.0)))
    nu, om = evo.nu, evo.omega

    def F(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return A * np.exp(1j * (nu * w0 + om) * zeta) + B * np.exp(
            1j * (nu * w0 - om) * zeta
        )

    return F


@dataclass
class ContinuationReport:
    """Two-clause residuals of the two-time continuation identity."""

    euclid_max: float             # max |G(s1,s2) - F(i(s1-s2))| over samples
    cone_deviations: list         # |F(t + i(s1-s2)) - Lambda+| along the cone
    cone_rate: float              # observed order of decay in |s1 - s2|

    def cone_linear(self, slack: float = 0.35) -> bool:
        """Whether the cone deviations shrink linearly with the approach scale."""
        return abs(self.cone_rate - 1.0) < slack


def two_time_continuation_check(
    lam: TwoPointKernel,
    ref: ModeReference,
    cone: ContinuationCone,
    n_euclid: int = 50,
) -> ContinuationReport:
    """Check both clauses of the stationary two-time continuation identity.

    Euclidean clause: G(s1, s2) from the reference inverse against
    F(i s1 - i s2) over n_euclid cone sample pairs.  Lorentzian clause:
    deviation of F evaluated just inside the cone from the assembled
    Lambda+ values, along the approach sequence of the cone.
    """
    if not lam.evo.fam.is_stationary():
        raise NotStationary("two-time continuation needs stationary coefficients")
    F = fitted_candidate(lam)

    rng = np.random.default_rng(5)
    span = ref.extent if ref.bc == "dirichlet" else ref.extent / 2.0
    worst = 0.0
    count = 0
    while count < n_euclid:
        s1 = rng.uniform(0.02, 0.48) * span
        s2 = -rng.uniform(0.02, 0.48) * span
        if not (0.25 <= abs(s2) / s1 <= 4.0):
            continue
        G = ref.green(s1, s2)
        val = F(1j * (s1 - s2))
        worst = max(worst, abs(G - val))
        count += 1

    evo = lam.evo
    jt = [evo.node(0.0), len(evo.t_grid) // 3]
    devs = []
    seps = []
    for s1, s2 in cone.pairs:
        d = 0.0
        for j1 in jt:
            for j2 in jt:
                t1, t2 = evo.t_grid[j1], evo.t_grid[j2]
                d = max(
                    d,
                    abs(F(t1 - t2 + 1j * (s1 - s2)) - lam.values[j1, j2]),
                )
        devs.append(d)
        seps.append(abs(s1 - s2))

    # Observed decay order of the deviation in the approach distance
    # |s1 - s2|, measured on the tail of the sequence where the first
    # Taylor term dominates (sep below a quarter oscillation period);
    # the endpoint log-log slope is insensitive to the cycling aspect.
    w0 = float(np.real(evo.fam.w.at_real(0.0)))
    freq = abs(evo.nu * w0) + (evo.omega if evo.omega is not None else 0.0)
    tail = [
        j
        for j in range(len(devs))
        if seps[j] * max(freq, 1.0) <= 0.25 and devs[j] > 1e-300
    ]
    if len(tail) >= 2:
        a, b = tail[0], tail[-1]
        rate = float(np.log(devs[b] / devs[a]) / np.log(seps[b] / seps[a]))
    else:
        rate = 0.0
    return ContinuationReport(worst, devs, rate)


@dataclass
class StripFunction:
    """Complex values on the rectangle t-grid x s-grid, s in [0, beta]."""

    t_grid: np.ndarray
    s_grid: np.ndarray
    values: np.ndarray        # (n_s, n_t)
    beta: float
    method: str = "spectral"

    def harmonicity_residual(self) -> float:
        """Interior residual of (d_t^2 + d_s^2) F, spectral in t, 5-point in s.

        Normalized by the largest interior value; rows nearer than two nodes
        to either edge are excluded.
        """
        n_t = len(self.t_grid)
        T_w = (self.t_grid[1] - self.t_grid[0]) * n_t
        nu_m = 2.0 * np.pi * np.fft.fftfreq(n_t, d=T_w / n_t)
        Fh = np.fft.fft(self.values, axis=1)
        d2t = np.fft.ifft(-(nu_m**2)[None, :] * Fh, axis=1)
        hs = self.s_grid[1] - self.s_grid[0]
        v = self.values
        d2s = np.zeros_like(v)
        d2s[2:-2] = (
            -v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]
        ) / (12 * hs * hs)
        res = (d2t + d2s)[2:-2]
        scale = max(np.max(np.abs(v[2:-2])), 1e-300)
        return float(np.max(np.abs(res)) / scale)


def _fft_setup(row: np.ndarray, t_grid: np.ndarray):
    row = np.asarray(row, dtype=complex)
    if row.shape != t_grid.shape:
        raise BoundaryMismatch("boundary row does not match the t-grid")
    n_t = len(t_grid)
    dt = float(t_grid[1] - t_grid[0])
    nu_m = 2.0 * np.pi * np.fft.fftfreq(n_t, d=dt)
    return row, n_t, nu_m


def harmonic_strip_continuation(
    top: np.ndarray,
    bottom: np.ndarray,
    t_grid: np.ndarray,
    beta: float,
    n_s: int,
) -> StripFunction:
    """Harmonic extension with Dirichlet rows at s = 0 (top data) and s = beta.

    Exact per temporal frequency: the extension of e^{i nu t} with edge
    values (a, b) is the sinh-quotient interpolant, evaluated in an
    overflow-safe exponential form.  The t-grid is treated as one full
    period (the last sample must not repeat the first).
    """
    top, n_t, nu_m = _fft_setup(np.asarray(top), np.asarray(t_grid))
    bottom = np.asarray(bottom, dtype=complex)
    if bottom.shape != top.shape:
        raise BoundaryMismatch("top and bottom rows live on different grids")
    s_grid = np.linspace(0.0, beta, n_s)
    gt = np.fft.fft(top)
    gb = np.fft.fft(bottom)
    vals = np.zeros((n_s, n_t), dtype=complex)
    absnu = np.abs(nu_m)
    for i, s in enumerate(s_grid):
        coef = np.empty(n_t, dtype=complex)
        nz = absnu > 0
        e2b = np.exp(-2.0 * absnu[nz] * beta)
        ct = np.exp(-absnu[nz] * s) * (1.0 - np.exp(-2.0 * absnu[nz] * (beta - s))) / (1.0 - e2b)
        cb = np.exp(-absnu[nz] * (beta - s)) * (1.0 - np.exp(-2.0 * absnu[nz] * s)) / (1.0 - e2b)
        coef[nz] = gt[nz] * ct + gb[nz] * cb
        coef[~nz] = gt[~nz] * (1.0 - s / beta) + gb[~nz] * (s / beta)
        vals[i] = np.fft.ifft(coef)
    return StripFunction(np.asarray(t_grid), s_grid, vals, beta, "spectral")


def harmonic_strip_march(
    top: np.ndarray,
    t_grid: np.ndarray,
    beta: float,
    n_s: int,
    method: str = "fd2",
) -> StripFunction:
    """One-sided holomorphic continuation of the top row across the strip.

    The continuation of the temporal mode e^{i nu t} to t + i s is
    e^{i nu t} e^{-nu s} (signed nu: Cauchy-Riemann fixes the normal
    derivative to -nu times the data, no two-row input needed).  method
    "exact" applies the factor per FFT bin; "fd2" marches the second-order
    recurrence f_{j+1} = 2 f_j - f_{j-1} + h^2 nu^2 f_j started with the
    Cauchy-Riemann slope, converging at second order in the s step.

    Bins whose amplitude is below a relative round-off threshold are dropped:
    the signed exponential amplifies noise at the unused high frequencies by
    e^{|nu| beta}, so marching them would swamp the result with rounding
    artifacts of the boundary data.
    """
    top, n_t, nu_m = _fft_setup(np.asarray(top), np.asarray(t_grid))
    s_grid = np.linspace(0.0, beta, n_s)
    g = np.fft.fft(top)
    keep = np.abs(g) > _BIN_TOL * max(np.max(np.abs(g)), 1e-300)
    if np.count_nonzero(keep) > max(8, n_t // 8):
        raise NonConvergent(
            "boundary row is not band-limited on this window (spectral "
            "leakage would be amplified exponentially across the strip); "
            "use a window commensurate with the mode frequencies"
        )
    g = np.where(keep, g, 0.0)
    vals = np.zeros((n_s, n_t), dtype=complex)
    if method == "exact":
        # exponentiate only the kept bins: the dropped high frequencies
        # would overflow e^{|nu| s} long before they matter
        idx = np.nonzero(keep)[0]
        for i, s in enumerate(s_grid):
            coef = np.zeros(n_t, dtype=complex)
            coef[idx] = g[idx] * np.exp(-nu_m[idx] * s)
            vals[i] = np.fft.ifft(coef)
        return StripFunction(np.asarray(t_grid), s_grid, vals, beta, "exact")
    if method != "fd2":
        raise ValueError(f"unknown strip method {method!r}")
    hs = float(s_grid[1] - s_grid[0])
    f_prev = g.copy()
    f_cur = g * (1.0 - hs * nu_m + 0.5 * hs * hs * nu_m**2)
    vals[0] = np.fft.ifft(f_prev)
    if n_s > 1:
        vals[1] = np.fft.ifft(f_cur)
    for i in range(2, n_s):
        f_next = 2.0 * f_cur - f_prev + hs * hs * nu_m**2 * f_cur
        f_prev, f_cur = f_cur, f_next
        vals[i] = np.fft.ifft(f_cur)
    return StripFunction(np.asarray(t_grid), s_grid, vals, beta, "fd2")


def boundary_value_extrapolation(strip: StripFunction, target: str = "top"):
    """Richardson extrapolation of interior rows to a strip edge.

    Uses four interior rows at distances h, 2h, 3h, 4h from the edge and
    Neville elimination of the leading error orders; the error estimate is
    the difference of the last two extrapolation columns.  NonConvergent if
    that difference exceeds the previous one (the table is diverging).
    """
    if target == "top":
        rows = [strip.values[j] for j in (1, 2, 3, 4)]
    elif target == "bottom":
        n = len(strip.s_grid)
        rows = [strip.values[n - 1 - j] for j in (1, 2, 3, 4)]
    else:
        raise ValueError(f"unknown edge {target!r}")
    if len(strip.s_grid) < 6:
        raise NonConvergent("need at least four interior rows near the edge")
    # Neville table for nodes x = 1, 2, 3, 4 evaluated at x = 0
    xs = np.array([1.0, 2.0, 3.0, 4.0])
    table = [np.array(r, dtype=complex) for r in rows]
    prev_gap = None
    for level in range(1, 4):
        new = []
        for i in range(4 - level):
            num = xs[i + level] * table[i] - xs[i] * table[i + 1]
            new.append(num / (xs[i + level] - xs[i]))
        gap = float(np.max(np.abs(new[0] - table[0])))
        table = new
        if prev_gap is not None and gap > 4.0 * prev_gap and gap > 1e-12:
            raise NonConvergent(
                f"extrapolation diverging: gaps {prev_gap:.3e} -> {gap:.3e}"
            )
        prev_gap = gap
    return table[0], prev_gap
