"""Config-driven experiment runner.

Subcommands
    check <cfg>      standing hypotheses of the complex metric
    calderon <cfg>   Calderon identities, closed forms, Green/cutoff identities
    twopoint <cfg>   CCR, state properties, equal-time amplitudes
    wick <cfg>       two-time continuation identity
    kms <cfg>        KMS continuation (periodic stationary scenarios)
    converge <cfg>   refinement study with observed-order assertions
    all <cfg>        every check listed in the config

Flags: --out DIR, --format csv|json, --modes N, --tol-scale X,
--levels N (converge only).  Exit codes: 0 all pass, 1 check failure,
2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import calderon, elliptic, geometry, lorentzian, reference, reports, twopoint, wick
from .errors import (
    CalwickError,
    CflViolation,
    ConfigError,
    GridTooCoarse,
    NonConvergent,
    NotStationary,
    SingularSystem,
)
from .reports import CheckRecord
from .scenario import ScenarioConfig, parse_config

TOLERANCES = {
    "hypotheses": 0.0,
    "calderon_sum": 1e-10,
    "calderon_positivity": 1e-10,
    "reflection_formula": 1e-10,
    "calderon_closed_form": 1e-9,
    "calderon_projection": 1e-9,
    "calderon_nonprojection": 1e-15,
    "green_identities": 1e-2,
    "cutoff_identities": 5e-2,
    "ccr": 1e-12,
    "ccr_rk4": 1e-7,
    "state_positivity": 1e-9,
    "state_bisolution": 1e-8,
    "state_bisolution_rk4": 1e-5,
    "state_ccr": 1e-10,
    "state_ccr_rk4": 1e-6,
    "equal_time_amplitude": 1e-9,
    "two_time_euclid": 1e-8,
    "two_time_cone": 0.2,
    "kms_closed": 1e-12,
    "kms_strip": 1e-4,
}

_SUBCOMMAND_CHECKS = {
    "check": ("hypotheses",),
    "calderon": (
        "calderon_sum",
        "calderon_positivity",
        "reflection_formula",
        "calderon_closed_form",
        "calderon_projection",
        "calderon_nonprojection",
        "green_identities",
        "cutoff_identities",
    ),
    "twopoint": ("ccr", "state_properties", "equal_time_amplitude"),
    "wick": ("two_time_wick",),
    "kms": ("kms",),
}


def _odd(n: int) -> int:
    n = int(n)
    return n if n % 2 == 1 else n + 1


def _mode_nus(cfg: ScenarioConfig, mode_cap: int | None):
    mm = cfg.mode_max if mode_cap is None else min(cfg.mode_max, mode_cap)
    return [(m, 2.0 * np.pi * m / cfg.circumference) for m in range(-mm, mm + 1)]


def _mode_window(cfg: ScenarioConfig, nu: float):
    """Per-mode Lorentzian window and grid size.

    Stationary scenarios get a window commensurate with the mode frequency
    (omega T is a multiple of pi), which the spectral KMS/fit paths rely on;
    the node count keeps the peak phase advance per step near 0.012 so the
    5-point bisolution stencils stay under their tolerances.  Non-stationary
    scenarios shrink the window for fast modes instead.
    """
    fam = cfg.family()
    target = 0.012
    cap = 1401
    if fam.is_stationary():
        om = lorentzian.lorentzian_frequency(fam, nu)
        w0 = abs(float(np.real(fam.w.at_real(0.0))))
        f = abs(nu) * w0 + om
        k = max(1, round(om * cfg.T / np.pi))
        while k > 1 and 2.0 * (np.pi * k / om) * f / target > cap:
            k -= 1
        T_m = np.pi * k / om
        n_t = _odd(max(101, int(np.ceil(2.0 * T_m * f / target)) + 1))
        return T_m, n_t
    tg = np.linspace(-cfg.T, cfg.T, 65)
    N = np.real(fam.N.at_real(tg))
    h = np.real(fam.h.at_real(tg))
    wf = np.real(fam.w.at_real(tg))
    mu = np.real(fam.mu.at_real(tg))
    f = float(np.max(N * np.sqrt(nu * nu / h + np.abs(mu))) + np.max(np.abs(nu * wf)))
    T_m = cfg.T if f <= 8.0 else cfg.T * 8.0 / f
    n_t = _odd(max(101, int(np.ceil(2.0 * T_m * f / 0.015)) + 1))
    return T_m, min(_odd(cap), n_t)


def _tol(check: str, scale: float) -> float:
    return TOLERANCES[check] * scale


def _is_flat(cfg: ScenarioConfig) -> bool:
    fam = cfg.family()
    return (
        fam.is_stationary()
        and abs(complex(fam.N.at_imag(0.0)) - 1.0) < 1e-14
        and abs(complex(fam.h.at_imag(0.0)) - 1.0) < 1e-14
        and abs(complex(fam.w.at_imag(0.0))) < 1e-14
    )


# ---------------------------------------------------------------- checks


def run_hypotheses(cfg: ScenarioConfig, tol_scale: float):
    fam = cfg.family()
    half = cfg.extent if cfg.bc == "dirichlet" else cfg.extent / 2.0
    s_grid = np.linspace(-half, half, 129)
    rep = geometry.check_hypotheses(fam, s_grid)
    residual = 0.0 if rep.passed else 1.0
    return [
        CheckRecord(
            "hypotheses",
            0,
            complex(rep.coercivity_constant),
            residual,
            _tol("hypotheses", tol_scale),
            param1=rep.min_det,
            param2=rep.min_axis_margin,
        )
    ]


def run_calderon(cfg: ScenarioConfig, tol_scale: float, mode_cap=None):
    fam = cfg.family()
    recs = []
    flat = _is_flat(cfg)
    q = calderon.Q_MATRIX
    eye = np.eye(2)
    for m, nu in _mode_nus(cfg, mode_cap):
        ref = reference.mode_reference(fam, nu, cfg.bc, cfg.extent)
        Cp = reference.calderon_matrix(ref, +1)
        Cm = reference.calderon_matrix(ref, -1)
        srs = float(np.max(np.abs(Cp + Cm - eye)))
        recs.append(
            CheckRecord(
                "calderon_sum", m, complex(Cp[0, 0] + Cm[0, 0]), srs,
                _tol("calderon_sum", tol_scale),
            )
        )
        viol = 0.0
        for sgn, C in ((+1.0, Cp), (-1.0, Cm)):
            M = sgn * q @ C
            ev = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
            viol = max(viol, max(0.0, -float(np.min(ev))))
        recs.append(
            CheckRecord(
                "calderon_positivity", m, complex(viol), viol,
                _tol("calderon_positivity", tol_scale),
            )
        )
        refl = reference.reflection_matrix(ref)
        rres = float(np.max(np.abs(Cp @ q - refl)))
        recs.append(
            CheckRecord(
                "reflection_formula", m, complex(refl[0, 0]), rres,
                _tol("reflection_formula", tol_scale),
            )
        )
        if flat and ref.omega_p is not None:
            om = float(np.real(ref.omega_p))
            if cfg.bc == "dirichlet":
                L = cfg.extent
                closed = 0.5 * np.array(
                    [[1.0, np.tanh(om * L) / om], [om / np.tanh(om * L), 1.0]]
                )
            else:
                arg = om * cfg.extent / 2.0
                closed = 0.5 * np.array(
                    [[1.0, 1.0 / (om * np.tanh(arg))], [om / np.tanh(arg), 1.0]]
                )
            recs.append(
                CheckRecord(
                    "calderon_closed_form", m, complex(Cp[0, 1]),
                    float(np.max(np.abs(Cp - closed))),
                    _tol("calderon_closed_form", tol_scale),
                )
            )
        defect = float(np.max(np.abs(Cp @ Cp - Cp)))
        if cfg.bc == "dirichlet":
            recs.append(
                CheckRecord(
                    "calderon_projection", m, complex(defect), defect,
                    _tol("calderon_projection", tol_scale),
                )
            )
        elif ref.omega_p is not None:
            om = float(np.real(ref.omega_p))
            if om * cfg.extent <= 4.0:
                residual = 0.0 if defect > 0.01 else 0.01 - defect
                recs.append(
                    CheckRecord(
                        "calderon_nonprojection", m, complex(defect), residual,
                        _tol("calderon_nonprojection", tol_scale),
                    )
                )
    return recs


def _bump(s_grid: np.ndarray, half: float) -> np.ndarray:
    t0, t1 = half / 2.0, 3.0 * half / 4.0
    x = np.abs(s_grid)
    return np.where(
        x <= t0,
        1.0,
        np.where(x >= t1, 0.0, 0.5 * (1.0 + np.cos(np.pi * (x - t0) / (t1 - t0)))),
    )


def _smooth_field(rng, sysm) -> np.ndarray:
    """Band-limited random test field (smooth enough for stencil accuracy).

    Random coefficients on the six lowest basis functions compatible with
    the boundary condition; white noise would carry O(1/h^2) discrete
    derivatives and swamp the identity residuals with stencil error.
    Periodic fields are windowed to vanish with their derivative at the
    antipode s = +-beta/2, which is the second boundary component of the
    half circle and does not appear in the interface trace terms.
    """
    s = sysm.s_grid
    out = np.zeros(len(s), dtype=complex)
    for k in range(1, 7):
        a = rng.standard_normal() + 1j * rng.standard_normal()
        if sysm.bc == "dirichlet":
            L = sysm.extent
            out += a * np.sin(k * np.pi * (s + L) / (2.0 * L))
        else:
            out += a * np.exp(2j * np.pi * k * s / sysm.extent)
    if sysm.bc == "periodic":
        out *= np.cos(np.pi * s / sysm.extent) ** 2
    return out


def run_green_cutoff(cfg: ScenarioConfig, tol_scale: float, mode_cap=None, n_s=None):
    fam = cfg.family()
    n_s = cfg.n_s if n_s is None else n_s
    half = cfg.extent if cfg.bc == "dirichlet" else cfg.extent / 2.0
    recs = []
    rng = np.random.default_rng(3)
    f = np.array([0.0, 1.0])
    g = np.array([0.0, 0.7 + 0.2j])
    for m, nu in _mode_nus(cfg, mode_cap):
        sysm = elliptic.assemble_K(fam, nu, cfg.bc, cfg.extent, n_s)
        ops = calderon.build_boundary_operators(fam, nu)
        u = _smooth_field(rng, sysm)
        v = _smooth_field(rng, sysm)
        worst = 0.0
        for side in (+1, -1):
            r1, r2 = calderon.green_identity_check(sysm, u, v, side, ops=ops)
            worst = max(worst, r1, r2)
        recs.append(
            CheckRecord(
                "green_identities", m, complex(worst), worst,
                _tol("green_identities", tol_scale), param1=float(n_s),
            )
        )
        chi = _bump(sysm.s_grid, half)
        ra, rb = calderon.cutoff_identity_check(sysm, chi, f, g, ops=ops)
        recs.append(
            CheckRecord(
                "cutoff_identities", m, complex(ra), max(ra, rb),
                _tol("cutoff_identities", tol_scale), param1=float(n_s),
            )
        )
    return recs


def run_ccr(cfg: ScenarioConfig, tol_scale: float, mode_cap=None):
    fam = cfg.family()
    stationary = fam.is_stationary()
    recs = []
    for m, nu in _mode_nus(cfg, mode_cap):
        T_m, n_t = _mode_window(cfg, nu)
        evo = lorentzian.evolve_modes(fam, nu, T_m, n_t, cfg.integrator)
        if evo.integrator == "closed_form":
            res = lorentzian.verify_ccr(evo)
            tol = _tol("ccr", tol_scale)
        else:
            res = lorentzian.verify_ccr_dual(evo, n_steps=512)
            tol = _tol("ccr_rk4", tol_scale)
        val = lorentzian.causal_propagator(evo, evo.t_grid[-1], 0.0)
        recs.append(CheckRecord("ccr", m, val, res, tol, param1=float(n_t)))
    return recs


def run_state(cfg: ScenarioConfig, tol_scale: float, mode_cap=None):
    fam = cfg.family()
    rk4 = not fam.is_stationary() or cfg.integrator == "rk4"
    suffix = "_rk4" if rk4 else ""
    recs = []
    for m, nu in _mode_nus(cfg, mode_cap):
        T_m, n_t = _mode_window(cfg, nu)
        evo = lorentzian.evolve_modes(fam, nu, T_m, n_t, cfg.integrator)
        ref = reference.mode_reference(fam, nu, cfg.bc, cfg.extent)
        lam_p = twopoint.assemble_two_point(reference.calderon_matrix(ref, +1), evo, +1)
        lam_m = twopoint.assemble_two_point(reference.calderon_matrix(ref, -1), evo, -1)
        rep = twopoint.verify_state_properties(lam_p, lam_m)
        recs.append(
            CheckRecord(
                "state_properties", m, complex(rep.positivity_min),
                max(0.0, -rep.positivity_min),
                _tol("state_positivity", tol_scale), param1=1.0,
            )
        )
        recs.append(
            CheckRecord(
                "state_properties", m, complex(rep.bisolution_res),
                rep.bisolution_res,
                _tol("state_bisolution" + suffix, tol_scale), param1=2.0,
            )
        )
        recs.append(
            CheckRecord(
                "state_properties", m, complex(rep.ccr_res), rep.ccr_res,
                _tol("state_ccr" + suffix, tol_scale), param1=3.0,
            )
        )
    return recs


def run_equal_time(cfg: ScenarioConfig, tol_scale: float, mode_cap=None):
    if cfg.bc != "periodic":
        return []
    fam = cfg.family()
    if not fam.is_stationary():
        raise NotStationary("equal-time thermal amplitude needs stationary coefficients")
    recs = []
    q = calderon.Q_MATRIX
    for m, nu in _mode_nus(cfg, mode_cap):
        ref = reference.mode_reference(fam, nu, cfg.bc, cfg.extent)
        Cp = reference.calderon_matrix(ref, +1)
        w_sigma = ref.red.boundary_weight()
        # rows at t = 0 are (1, 0): the amplitude is the (0,0) entry
        amp = complex((Cp @ q)[0, 0] / w_sigma)
        om = float(np.real(ref.omega_p))
        oracle = twopoint.thermal_mode_oracle(om, cfg.extent, 0.0, 0.0)
        recs.append(
            CheckRecord(
                "equal_time_amplitude", m, amp, abs(amp - oracle),
                _tol("equal_time_amplitude", tol_scale),
            )
        )
    return recs


def run_two_time(cfg: ScenarioConfig, tol_scale: float, mode_cap=None):
    fam = cfg.family()
    if not fam.is_stationary():
        raise NotStationary("two-time continuation needs stationary coefficients")
    cone = wick.make_cone()
    recs = []
    for m, nu in _mode_nus(cfg, mode_cap):
        T_m, n_t = _mode_window(cfg, nu)
        evo = lorentzian.evolve_modes(fam, nu, T_m, n_t, cfg.integrator)
        ref = reference.mode_reference(fam, nu, cfg.bc, cfg.extent)
        lam_p = twopoint.assemble_two_point(reference.calderon_matrix(ref, +1), evo, +1)
        rep = wick.two_time_continuation_check(lam_p, ref, cone)
        recs.append(
            CheckRecord(
                "two_time_wick", m, complex(rep.euclid_max), rep.euclid_max,
                _tol("two_time_euclid", tol_scale), param1=1.0,
            )
        )
        dev = 0.0 if rep.cone_linear() else abs(rep.cone_rate - 1.0)
        recs.append(
            CheckRecord(
                "two_time_wick", m, complex(rep.cone_rate), dev,
                _tol("two_time_cone", tol_scale), param1=2.0,
            )
        )
    return recs


def run_kms(cfg: ScenarioConfig, tol_scale: float, mode_cap=None, strip_n=201):
    if cfg.bc != "periodic":
        return []
    fam = cfg.family()
    if not fam.is_stationary():
        raise NotStationary("KMS continuation needs stationary coefficients")
    recs = []
    for m, nu in _mode_nus(cfg, mode_cap):
        T_m, n_t = _mode_window(cfg, nu)
        evo = lorentzian.evolve_modes(fam, nu, T_m, n_t, cfg.integrator)
        ref = reference.mode_reference(fam, nu, cfg.bc, cfg.extent)
        lam_p = twopoint.assemble_two_point(reference.calderon_matrix(ref, +1), evo, +1)
        lam_m = twopoint.assemble_two_point(reference.calderon_matrix(ref, -1), evo, -1)
        rep = twopoint.verify_kms(lam_p, lam_m, cfg.extent, strip_n=strip_n)
        recs.append(
            CheckRecord(
                "kms", m, complex(rep.residual_closed), rep.residual_closed,
                _tol("kms_closed", tol_scale), param1=1.0,
            )
        )
        recs.append(
            CheckRecord(
                "kms", m, complex(rep.residual_strip), rep.residual_strip,
                _tol("kms_strip", tol_scale), param1=2.0, param2=float(strip_n),
            )
        )
    return recs


_RUNNERS = {
    "hypotheses": run_hypotheses,
    "calderon_sum": None,          # grouped under run_calderon
    "ccr": run_ccr,
    "state_properties": run_state,
    "equal_time_amplitude": run_equal_time,
    "two_time_wick": run_two_time,
    "kms": run_kms,
}

_CALDERON_GROUP = {
    "calderon_sum",
    "calderon_positivity",
    "reflection_formula",
    "calderon_closed_form",
    "calderon_projection",
    "calderon_nonprojection",
}
_GRID_GROUP = {"green_identities", "cutoff_identities"}


def run_checks(cfg: ScenarioConfig, wanted, tol_scale: float, mode_cap=None):
    """Run the requested check ids; returns (records, timing dict)."""
    wanted = [c for c in wanted if c in cfg.checks]
    records = []
    timing = {}
    done_groups = set()
    for check in wanted:
        start = time.perf_counter()
        if check in _CALDERON_GROUP:
            if "calderon" in done_groups:
                continue
            done_groups.add("calderon")
            new = [
                r
                for r in run_calderon(cfg, tol_scale, mode_cap)
                if r.check_id in cfg.checks
            ]
        elif check in _GRID_GROUP:
            if "grid" in done_groups:
                continue
            done_groups.add("grid")
            new = [
                r
                for r in run_green_cutoff(cfg, tol_scale, mode_cap)
                if r.check_id in cfg.checks
            ]
        else:
            new = _RUNNERS[check](cfg, tol_scale) if check == "hypotheses" else _RUNNERS[
                check
            ](cfg, tol_scale, mode_cap)
        records.extend(new)
        key = (
            "calderon" if check in _CALDERON_GROUP
            else "grid" if check in _GRID_GROUP
            else check
        )
        timing[key] = round(time.perf_counter() - start, 6)
    return records, timing


# ------------------------------------------------------------- converge


def _orders(residuals):
    out = []
    for a, b in zip(residuals, residuals[1:]):
        if a < 1e-12 and b < 1e-12:
            out.append(float("inf"))   # at floor: no truncation error left
        elif b <= 0:
            out.append(float("inf"))
        else:
            out.append(float(np.log2(a / b)))
    return out


def run_converge(cfg: ScenarioConfig, levels: int, tol_scale: float, mode_cap=None):
    """Refinement study: residual vs resolution with observed orders.

    Grid checks refine n_s, RK4 CCR refines the step count, the KMS strip
    refines its s-grid.  Closed-form paths sit at round-off and are reported
    as floor.  Records carry param1 = level, param2 = resolution.
    """
    fam = cfg.family()
    records = []
    failures = []
    modes_used = [m for m in (1, 5) if m <= cfg.mode_max] or [0]
    wanted = set(cfg.checks)

    if wanted & _GRID_GROUP or "calderon_sum" in wanted:
        for m in modes_used:
            nu = 2.0 * np.pi * m / cfg.circumference
            green_res, cut_res, sum_res = [], [], []
            sizes = []
            for lev in range(levels):
                n_s = (cfg.n_s - 1) * (2**lev) + 1
                sizes.append(n_s)
                recs = run_green_cutoff(cfg, tol_scale, mode_cap=None, n_s=n_s)
                byid = {}
                for r in recs:
                    if r.mode == m:
                        byid[r.check_id] = r.residual
                green_res.append(byid.get("green_identities", np.nan))
                cut_res.append(byid.get("cutoff_identities", np.nan))
                sysm = elliptic.assemble_K(fam, nu, cfg.bc, cfg.extent, n_s)
                ref = reference.mode_reference(fam, nu, cfg.bc, cfg.extent)
                Cp_ref = reference.calderon_matrix(ref, +1)
                Cm_ref = reference.calderon_matrix(ref, -1)
                Cp = calderon.calderon_operator(sysm, +1)
                Cm = calderon.calderon_operator(sysm, -1)
                err = float(
                    np.max(np.abs(Cp - Cp_ref)) + np.max(np.abs(Cm - Cm_ref))
                )
                sum_res.append(err)
            for label, series, floor_order in (
                ("green_identities", green_res, 1.8),
                ("cutoff_identities", cut_res, 1.8),
                ("calderon_sum", sum_res, 1.8),
            ):
                if label not in wanted:
                    continue
                orders = _orders(series)
                ok = all(o >= floor_order for o in orders[-2:])
                if not ok:
                    failures.append(f"{label} mode {m}: orders {orders}")
                for lev, (n_s, res) in enumerate(zip(sizes, series)):
                    records.append(
                        CheckRecord(
                            f"converge_{label}", m, complex(res), res,
                            float("inf"), param1=float(lev), param2=float(n_s),
                        )
                    )

    if "ccr" in wanted:
        for m in modes_used:
            nu = 2.0 * np.pi * m / cfg.circumference
            T_m, n_t = _mode_window(cfg, nu)
            evo = lorentzian.evolve_modes(fam, nu, T_m, n_t, cfg.integrator)
            series = []
            steps = []
            for lev in range(levels):
                n_steps = 32 * (2**lev)
                steps.append(n_steps)
                if evo.integrator == "closed_form":
                    series.append(lorentzian.verify_ccr(evo))
                else:
                    series.append(lorentzian.verify_ccr_dual(evo, n_steps=n_steps))
            orders = _orders(series)
            if evo.integrator == "closed_form":
                if any(r > 1e-12 for r in series):
                    failures.append(f"ccr mode {m}: closed form not at floor")
            else:
                if not all(o >= 3.8 for o in orders[-2:]):
                    failures.append(f"ccr mode {m}: orders {orders}")
            for lev, (n_steps, res) in enumerate(zip(steps, series)):
                records.append(
                    CheckRecord(
                        "converge_ccr", m, complex(res), res, float("inf"),
                        param1=float(lev), param2=float(n_steps),
                    )
                )

    if "kms" in wanted and cfg.bc == "periodic" and fam.is_stationary():
        for m in modes_used:
            nu = 2.0 * np.pi * m / cfg.circumference
            T_m, n_t = _mode_window(cfg, nu)
            evo = lorentzian.evolve_modes(fam, nu, T_m, n_t, cfg.integrator)
            ref = reference.mode_reference(fam, nu, cfg.bc, cfg.extent)
            lam_p = twopoint.assemble_two_point(
                reference.calderon_matrix(ref, +1), evo, +1
            )
            lam_m = twopoint.assemble_two_point(
                reference.calderon_matrix(ref, -1), evo, -1
            )
            series = []
            sizes = []
            for lev in range(levels):
                strip_n = 50 * (2**lev) + 1
                sizes.append(strip_n)
                rep = twopoint.verify_kms(lam_p, lam_m, cfg.extent, strip_n=strip_n)
                series.append(rep.residual_strip)
            orders = _orders(series)
            if not all(o >= 1.8 for o in orders[-2:]):
                failures.append(f"kms strip mode {m}: orders {orders}")
            for lev, (strip_n, res) in enumerate(zip(sizes, series)):
                records.append(
                    CheckRecord(
                        "converge_kms", m, complex(res), res, float("inf"),
                        param1=float(lev), param2=float(strip_n),
                    )
                )

    return records, failures


# ------------------------------------------------------------------ main


def _build_parser():
    p = argparse.ArgumentParser(prog="calwick", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("check", "calderon", "twopoint", "wick", "kms", "converge", "all"):
        sp = sub.add_parser(name)
        sp.add_argument("config")
        sp.add_argument("--out", default=None, help="output directory override")
        sp.add_argument("--format", default=None, choices=("csv", "json"))
        sp.add_argument("--modes", type=int, default=None, help="cap |k| at N")
        sp.add_argument("--tol-scale", type=float, default=1.0)
        if name == "converge":
            sp.add_argument("--levels", type=int, default=3)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = args.out or cfg.out_dir
    fmt = args.format or cfg.out_format
    try:
        if args.command == "converge":
            if args.levels < 3:
                print("config error: --levels must be >= 3", file=sys.stderr)
                return 2
            records, failures = run_converge(
                cfg, args.levels, args.tol_scale, args.modes
            )
            by_check = {}
            for r in records:
                by_check.setdefault(r.check_id, []).append(r)
            reports.emit(out_dir, cfg.name, fmt, by_check)
            for f in failures:
                print(f"FAIL {f}")
            if not failures:
                print(f"converge: all observed orders within bounds ({len(records)} rows)")
            return 1 if failures else 0

        if args.command == "all":
            wanted = list(cfg.checks)
        else:
            wanted = [c for c in _SUBCOMMAND_CHECKS[args.command]]
        records, timing = run_checks(cfg, wanted, args.tol_scale, args.modes)
        by_check = {}
        for r in records:
            by_check.setdefault(r.check_id, []).append(r)
        reports.emit(out_dir, cfg.name, fmt, by_check)
        report = reports.write_report_json(
            os.path.join(out_dir, "report.json"),
            cfg.name,
            cfg.content_hash(),
            records,
            timing,
        )
        n_fail = sum(1 for r in report["records"] if not r["pass"])
        for r in report["records"]:
            if not r["pass"]:
                print(
                    f"FAIL {r['check_id']} mode {r['mode']}: "
                    f"residual {r['residual']:.3e} > tol {r['tolerance']:.3e}"
                )
        print(
            f"{cfg.name}: {len(report['records']) - n_fail}/{len(report['records'])} "
            f"records pass"
        )
        return 0 if n_fail == 0 else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SingularSystem, NonConvergent, CflViolation, GridTooCoarse) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except CalwickError as exc:
        print(f"error in scenario {cfg.name}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
