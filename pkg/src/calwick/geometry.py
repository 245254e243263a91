"""Lorentzian metric, its Wick rotation, and the standing hypotheses.

The Lorentzian line element on R_t x S^1_y is

    g = -N^2(t) dt^2 + h(t) (dy + w(t) dt)^2,

and its Wick rotation, obtained by evaluating the analytic coefficients at
z = i s, is the complex metric

    k = N^2(is) ds^2 + h(is) (dy + i w(is) ds)^2.

The ellipticity hypothesis requires det(k) > 0 pointwise and that the
quadratic form v |-> v . k^{-1} . v avoids the closed negative real axis for
all real covectors v != 0.  In this 1+1d form det(k) = N^2(is) h(is)
identically, which the tests exercise as an exact identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridAsymmetry, HypothesisViolation, NonLorentzian
from .families import CoefficientFamily

_NEG_AXIS_TOL = 1e-12


def eval_lorentzian(fam: CoefficientFamily, t: float, y: float = 0.0) -> np.ndarray:
    """Lorentzian metric matrix g in the (dt, dy) basis at real time t.

    g_tt = -N^2 + h w^2, g_ty = h w, g_yy = h, signature (-, +).
    """
    N = float(fam.N.at_real(t))
    h = float(fam.h.at_real(t))
    w = float(fam.w.at_real(t))
    if h <= 0.0 or N <= 0.0:
        raise NonLorentzian(f"h={h}, N={N} at t={t}: need h > 0 and N > 0")
    return np.array([[-N * N + h * w * w, h * w], [h * w, h]], dtype=float)


@dataclass(frozen=True)
class ComplexMetricSample:
    """The Wick-rotated metric k and derived data at one point (s, y)."""

    k: np.ndarray        # 2x2 complex symmetric, (ds, dy) basis
    det_k: float         # real > 0
    k_inv: np.ndarray    # 2x2 complex
    point: tuple[float, float]

    @property
    def half_density(self) -> float:
        """|k|^{1/2} with the positive real root (det_k > 0 by hypothesis)."""
        return float(np.sqrt(self.det_k))


def eval_complex_metric(fam: CoefficientFamily, s: float, y: float = 0.0) -> ComplexMetricSample:
    """Evaluate k = N^2(is) ds^2 + h(is)(dy + i w(is) ds)^2 at (s, y).

    Raises HypothesisViolation when det(k) fails to be real positive or the
    inverse-metric quadratic form touches the closed negative real axis on a
    covector sample circle.
    """
    N = complex(fam.N.at_imag(s))
    h = complex(fam.h.at_imag(s))
    w = complex(fam.w.at_imag(s))
    k = np.array(
        [[N * N - h * w * w, 1j * h * w], [1j * h * w, h]], dtype=complex
    )
    det = k[0, 0] * k[1, 1] - k[0, 1] * k[1, 0]
    if abs(det.imag) > 1e-12 * (1.0 + abs(det)) or det.real <= 0.0:
        raise HypothesisViolation(f"det(k) = {det} not real positive at s={s}")
    det_k = float(det.real)
    k_inv = np.array([[k[1, 1], -k[0, 1]], [-k[1, 0], k[0, 0]]], dtype=complex) / det
    sample = ComplexMetricSample(k=k, det_k=det_k, k_inv=k_inv, point=(float(s), float(y)))
    bad = _negative_axis_margin(sample, n_directions=64)
    if bad <= _NEG_AXIS_TOL:
        raise HypothesisViolation(
            f"v.k^-1.v meets the closed negative real axis at s={s} (margin {bad:.3e})"
        )
    return sample


def _quadratic_form_values(sample: ComplexMetricSample, n_directions: int) -> np.ndarray:
    theta = np.pi * np.arange(n_directions) / n_directions
    v = np.stack([np.cos(theta), np.sin(theta)])
    return np.einsum("id,ij,jd->d", v, sample.k_inv, v)


def _negative_axis_margin(sample: ComplexMetricSample, n_directions: int) -> float:
    """Min distance of v.k^{-1}.v from (-inf, 0] over unit covectors v."""
    q = _quadratic_form_values(sample, n_directions)
    dist = np.where(q.real >= 0.0, np.abs(q), np.abs(q.imag))
    return float(np.min(dist))


@dataclass
class HypothesisReport:
    """Result of sampling the ellipticity and coercivity hypotheses."""

    min_det: float
    min_axis_margin: float
    coercivity_constant: float
    passed: bool
    failures: list

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (
            f"hypotheses {status}: min det={self.min_det:.6g}, "
            f"axis margin={self.min_axis_margin:.3e}, C={self.coercivity_constant:.6g}"
        )


def check_hypotheses(fam: CoefficientFamily, s_grid, n_directions: int = 64) -> HypothesisReport:
    """Sample the standing hypotheses on a grid of s values.

    Reports the minimal det(k), the worst-case distance of the inverse-metric
    quadratic form from the closed negative real axis, and the smallest
    admissible coercivity constant C = max |Im q| / Re q over sampled values
    of the quadratic form q of k itself.  Report-only: failures are collected,
    not raised.
    """
    min_det = np.inf
    min_margin = np.inf
    coercivity = 0.0
    failures = []
    for s in np.asarray(s_grid, dtype=float):
        try:
            sample = eval_complex_metric(fam, s)
        except HypothesisViolation as exc:
            failures.append(str(exc))
            continue
        min_det = min(min_det, sample.det_k)
        min_margin = min(min_margin, _negative_axis_margin(sample, n_directions))
        theta = np.pi * np.arange(n_directions) / n_directions
        v = np.stack([np.cos(theta), np.sin(theta)])
        q = np.einsum("id,ij,jd->d", v, sample.k, v)
        re = q.real
        if np.any(re <= 0.0):
            failures.append(f"Re(v.k.v) <= 0 at s={s}")
        else:
            coercivity = max(coercivity, float(np.max(np.abs(q.imag) / re)))
    passed = not failures and min_margin > _NEG_AXIS_TOL
    return HypothesisReport(
        min_det=float(min_det),
        min_axis_margin=float(min_margin),
        coercivity_constant=coercivity,
        passed=passed,
        failures=failures,
    )


def check_metric_matrix(k: np.ndarray) -> None:
    """Raise HypothesisViolation if an explicit 2x2 matrix fails det(k) > 0."""
    det = k[0, 0] * k[1, 1] - k[0, 1] * k[1, 0]
    if abs(np.imag(det)) > 1e-12 * (1.0 + abs(det)) or np.real(det) <= 0.0:
        raise HypothesisViolation(f"det(k) = {det} not real positive")


class Involution:
    """The reflection kappa: (s, y) -> (-s, y) acting on sampled fields.

    Grids must contain s = 0 as a node and be symmetric under s -> -s
    (for periodic grids: modulo the period).
    """

    def __init__(self, s_grid, periodic: bool = False, period: float | None = None):
        s = np.asarray(s_grid, dtype=float)
        self.s_grid = s
        self.periodic = periodic
        self.period = period
        if periodic:
            if period is None:
                raise ValueError("periodic involution needs the period")
            neg = np.mod(-s + period / 2.0, period) - period / 2.0
        else:
            neg = -s
        idx = np.empty(len(s), dtype=int)
        tol = 1e-9 * max(1.0, float(np.max(np.abs(s))))
        for i, val in enumerate(neg):
            j = int(np.argmin(np.abs(s - val)))
            if abs(s[j] - val) > tol:
                raise GridAsymmetry(f"s-grid is not reflection symmetric near s={s[i]}")
            idx[i] = j
        self.index_map = idx

    def __call__(self, field):
        """Pull back a field: (kappa u)(s, y) = u(-s, y).

        Acts on the leading axis of the array (the s axis).
        """
        field = np.asarray(field)
        return field[self.index_map]

    @property
    def center(self) -> int:
        """Index of the s = 0 node."""
        j = int(np.argmin(np.abs(self.s_grid)))
        if abs(self.s_grid[j]) > 1e-12:
            raise GridAsymmetry("s-grid has no node at s = 0")
        return j

    def positive_side(self) -> np.ndarray:
        """Indices of the Omega^+ = {s > 0} nodes."""
        return np.where(self.s_grid > 1e-14)[0]

    def negative_side(self) -> np.ndarray:
        return np.where(self.s_grid < -1e-14)[0]
