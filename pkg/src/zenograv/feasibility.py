"""Constraint intersection over experiment parameters.

One ExperimentPoint fixes the source (radius, density), the probe (mass,
speed via t_R = R/v), the safety margins and the environment; evaluating
it runs every constraint of the proposal and reports margins:

  deflection      max deflection angle above the detector floor (sharp)
  time            scattering duration below the run budget (sharp)
  zeno-rate       required freeze rate from the freeze dynamics itself
  decoherence     required freeze rate from environmental localization
  classicality    probe wavepacket stays point-like over the run
  mean-free-path  probe flies collision-free through the gas

Strict "much greater/less than" conditions are operationalized with a
strictness factor (default 100): the interaction-timescale bound and the
momentum/path comparisons use it, while the survival bound already
carries the run duration and the two detector thresholds (theta_min,
t_total_cap) are sharp inequalities.  The required freeze rate reported
is the max of the decoherence total and the dynamics requirement, and
passes when it sits below an achievable-rate ceiling (default 1e3 1/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import decoherence as deco
from . import scatter, zeno
from .constants import CONST, PhysicalConstants, joules_to_ev
from .errors import InvalidParameterError, ZenogravError

SWEEP_AXES = ("R", "v", "t_R", "p", "T", "m_probe")


@dataclass(frozen=True)
class ExperimentPoint:
    """One point of experiment-parameter space (SI units)."""

    R: float                       # source sphere radius (m)
    density: float                 # source density (kg/m^3)
    beta: float                    # impact-parameter margin, b0 = beta R
    zeta: float                    # anomaly fraction defining the run length
    t_R: float                     # R / v (s)
    m_probe: float                 # probe mass (kg)
    R_probe: float                 # probe radius, mean-free-path only (m)
    env: deco.Environment
    t_total_cap: float = 100.0     # run-duration budget (s)
    theta_min: float = 1e-4        # detector angular floor (rad)
    strictness: float = 100.0      # the ">> means >= 100x" factor
    sigma_ratio_max: float = 0.02  # classicality ceiling on sigma_min/R
    gamma_zeno_achievable: float = 1e3   # measurement-rate ceiling (1/s)

    def __post_init__(self):
        if self.R <= 0 or self.density <= 0 or self.t_R <= 0:
            raise InvalidParameterError("R, density, t_R must all be > 0")
        if self.beta <= 1.0:
            raise InvalidParameterError(f"beta must be > 1, got {self.beta}")
        if not 0.0 < self.zeta < 1.0:
            raise InvalidParameterError(f"zeta must be in (0,1), got {self.zeta}")
        if self.m_probe <= 0 or self.R_probe < 0:
            raise InvalidParameterError("m_probe must be > 0, R_probe >= 0")
        if self.t_total_cap <= 0 or self.theta_min <= 0:
            raise InvalidParameterError("t_total_cap and theta_min must be > 0")
        if self.strictness < 1 or self.gamma_zeno_achievable <= 0:
            raise InvalidParameterError("strictness >= 1 and achievable rate > 0")

    @property
    def v(self) -> float:
        """Probe speed R / t_R (m/s)."""
        return self.R / self.t_R

    @property
    def M(self) -> float:
        """Source mass (4/3) pi density R^3 (kg)."""
        return 4.0 / 3.0 * np.pi * self.density * self.R**3

    @property
    def b0(self) -> float:
        """Minimum safe impact parameter beta * R (m)."""
        return self.beta * self.R


def reference_point() -> ExperimentPoint:
    """The summary feasibility configuration.

    10 um silica sphere (mass ~1e-11 kg), probe of 1e-18 kg at 1 um/s
    (t_R = 10 s), cryogenic ultra-high vacuum (1e-15 Pa, 1 K).
    """
    return ExperimentPoint(
        R=1e-5, density=2600.0, beta=1.2, zeta=0.75, t_R=10.0,
        m_probe=1e-18, R_probe=1e-6,
        env=deco.Environment(pressure=1e-15, T_env=1.0, T_int=1.0))


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    value: float
    threshold: float
    margin: float            # >= 1 means satisfied
    passed: bool | None      # None: sub-evaluation failed, indeterminate
    note: str = ""


@dataclass(frozen=True)
class ConstraintReport:
    point: ExperimentPoint
    theta_max: float               # rad
    t_total: float                 # s, uncapped scattering duration
    t_used: float                  # s, duration used in rate/spread bounds
    tau_Z: float                   # s, freeze timescale
    breakdown: deco.DecoherenceBreakdown | None
    gamma_dyn_required: float      # 1/s, freeze-dynamics requirement
    gamma_zeno_required: float     # 1/s, max of decoherence and dynamics
    sigma_ratio: float             # sigma_min / R
    dp_ratio: float                # dp_min / (m v)
    mfp: float                     # m
    kinetic_energy_eV: float
    constraints: tuple[ConstraintCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed is True for c in self.constraints)

    def constraint(self, name: str) -> ConstraintCheck:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)


def evaluate_point(pt: ExperimentPoint,
                   constants: PhysicalConstants = CONST) -> ConstraintReport:
    """Evaluate every constraint at one parameter point.

    Sub-evaluation failures (e.g. a non-hyperbolic orbit) mark only the
    constraints that depend on them as indeterminate.
    """
    checks = []
    notes = {}

    theta_max = scatter.rutherford_angle(pt.M, pt.v, pt.b0, constants)
    try:
        t_total = scatter.kepler_scatter_time(pt.M, pt.density, pt.beta,
                                              pt.zeta, pt.t_R, constants)
    except ZenogravError as exc:
        t_total = float("nan")
        notes["time"] = f"{type(exc).__name__}: {exc}"
    t_used = min(t_total, pt.t_total_cap) if math.isfinite(t_total) \
        else pt.t_total_cap

    tau_Z = zeno.zeno_time_estimate(pt.m_probe, pt.M, pt.b0, constants)
    rate_dyn, rate_surv = zeno.zeno_rate_bounds(tau_Z, t_used)
    gamma_dyn_required = max(pt.strictness * rate_dyn, rate_surv)

    try:
        breakdown = deco.total_decoherence(pt.env, pt.R, constants)
        gamma_deco = breakdown.gamma_total
    except ZenogravError as exc:
        breakdown, gamma_deco = None, float("nan")
        notes["decoherence"] = f"{type(exc).__name__}: {exc}"

    gamma_required = max(gamma_deco, gamma_dyn_required) \
        if math.isfinite(gamma_deco) else gamma_dyn_required

    sigma_min, _ = deco.wavepacket_spread_min(pt.m_probe, t_used, constants)
    sigma_ratio = sigma_min / pt.R
    _, dp_ratio = deco.momentum_floor(pt.m_probe, t_used, pt.v, constants)
    mfp = deco.mean_free_path(pt.env, pt.R_probe, constants).value
    ke_eV = joules_to_ev(0.5 * pt.m_probe * pt.v**2, constants)

    def add(name, value, threshold, margin, note=""):
        if name in notes:
            checks.append(ConstraintCheck(name, value, threshold,
                                          float("nan"), None, notes[name]))
        else:
            checks.append(ConstraintCheck(name, value, threshold, margin,
                                          bool(margin >= 1.0), note))

    add("deflection", theta_max, pt.theta_min, theta_max / pt.theta_min,
        "max deflection above detector floor (sharp)")
    add("time", t_total, pt.t_total_cap,
        pt.t_total_cap / t_total if t_total > 0 else float("inf"),
        "scattering duration within the run budget (sharp)")
    add("zeno-rate", gamma_dyn_required, pt.gamma_zeno_achievable,
        pt.gamma_zeno_achievable / gamma_dyn_required,
        "freeze-dynamics rate requirement achievable")
    add("decoherence", gamma_deco, pt.gamma_zeno_achievable,
        pt.gamma_zeno_achievable / gamma_deco if gamma_deco > 0 else float("inf"),
        "decoherence rate requirement achievable")
    class_margin = min(pt.sigma_ratio_max / sigma_ratio,
                       (1.0 / pt.strictness) / dp_ratio)
    add("classicality", sigma_ratio, pt.sigma_ratio_max, class_margin,
        "wavepacket spread and momentum width stay negligible")
    path = pt.v * t_used
    add("mean-free-path", mfp, pt.strictness * path,
        mfp / (pt.strictness * path),
        "collision-free flight over the full trajectory")

    return ConstraintReport(point=pt, theta_max=theta_max, t_total=t_total,
                            t_used=t_used, tau_Z=tau_Z, breakdown=breakdown,
                            gamma_dyn_required=gamma_dyn_required,
                            gamma_zeno_required=gamma_required,
                            sigma_ratio=sigma_ratio, dp_ratio=dp_ratio,
                            mfp=mfp, kinetic_energy_eV=ke_eV,
                            constraints=tuple(checks))


def report_to_dict(report: ConstraintReport) -> dict:
    pt = report.point
    return {
        "point": {
            "R_m": pt.R, "density_kg_m3": pt.density, "beta": pt.beta,
            "zeta": pt.zeta, "t_R_s": pt.t_R, "v_m_s": pt.v,
            "M_kg": pt.M, "m_probe_kg": pt.m_probe, "R_probe_m": pt.R_probe,
            "pressure_Pa": pt.env.pressure, "T_env_K": pt.env.T_env,
            "T_int_K": pt.env.T_int, "t_total_cap_s": pt.t_total_cap,
            "theta_min_rad": pt.theta_min, "strictness": pt.strictness,
            "sigma_ratio_max": pt.sigma_ratio_max,
            "gamma_zeno_achievable_s": pt.gamma_zeno_achievable,
        },
        "theta_max_rad": report.theta_max,
        "t_total_s": report.t_total,
        "t_used_s": report.t_used,
        "tau_Z_s": report.tau_Z,
        "gamma_gas_s": report.breakdown.gamma_gas if report.breakdown else None,
        "gamma_bb_sc_s": report.breakdown.gamma_bb_sc if report.breakdown else None,
        "gamma_bb_abs_s": report.breakdown.gamma_bb_abs if report.breakdown else None,
        "gamma_bb_em_s": report.breakdown.gamma_bb_em if report.breakdown else None,
        "gamma_dyn_required_s": report.gamma_dyn_required,
        "gamma_zeno_required_s": report.gamma_zeno_required,
        "sigma_ratio": report.sigma_ratio,
        "dp_ratio": report.dp_ratio,
        "mean_free_path_m": report.mfp,
        "kinetic_energy_eV": report.kinetic_energy_eV,
        "constraints": {
            c.name: {"value": c.value, "threshold": c.threshold,
                     "margin": c.margin, "passed": c.passed, "note": c.note}
            for c in report.constraints},
        "passed": report.passed,
    }


def _apply_axes(base: ExperimentPoint, assignments: dict) -> ExperimentPoint:
    """Point with axis values applied and R = v * t_R kept consistent.

    With two of {R, v, t_R} assigned the third is derived; with one
    assigned, an R axis keeps the base t_R (deriving v), while a v or t_R
    axis keeps the base R.  A T axis sets both environment temperatures.
    """
    pt = base
    env = base.env
    scatter_axes = {k: v for k, v in assignments.items() if k in ("R", "v", "t_R")}
    if len(scatter_axes) > 2:
        raise InvalidParameterError("at most two of R, v, t_R may be axes")
    if {"R", "v"} <= set(scatter_axes):
        pt = replace(pt, R=scatter_axes["R"],
                     t_R=scatter_axes["R"] / scatter_axes["v"])
    elif {"R", "t_R"} <= set(scatter_axes):
        pt = replace(pt, R=scatter_axes["R"], t_R=scatter_axes["t_R"])
    elif {"v", "t_R"} <= set(scatter_axes):
        pt = replace(pt, R=scatter_axes["v"] * scatter_axes["t_R"],
                     t_R=scatter_axes["t_R"])
    elif "R" in scatter_axes:
        pt = replace(pt, R=scatter_axes["R"])
    elif "v" in scatter_axes:
        pt = replace(pt, t_R=pt.R / scatter_axes["v"])
    elif "t_R" in scatter_axes:
        pt = replace(pt, t_R=scatter_axes["t_R"])
    if "p" in assignments:
        env = replace(env, pressure=assignments["p"])
    if "T" in assignments:
        env = replace(env, T_env=assignments["T"], T_int=assignments["T"])
    if env is not base.env:
        pt = replace(pt, env=env)
    if "m_probe" in assignments:
        pt = replace(pt, m_probe=assignments["m_probe"])
    return pt


@dataclass(frozen=True)
class RegionRow:
    axis1: float
    axis2: float
    theta_max: float
    t_total: float
    gamma_required: float
    sigma_ratio: float
    mfp: float
    KE_eV: float
    passed: bool


def sweep_region(axis1: tuple[str, np.ndarray], axis2: tuple[str, np.ndarray],
                 base: ExperimentPoint,
                 constants: PhysicalConstants = CONST) -> list[RegionRow]:
    """Evaluate a 2D grid of points; rows ordered axis1-major.

    Axis names come from {R, v, t_R, p, T, m_probe}; values should be
    log-spaced for the usual decade-spanning sweeps.
    """
    name1, vals1 = axis1
    name2, vals2 = axis2
    for name in (name1, name2):
        if name not in SWEEP_AXES:
            raise InvalidParameterError(
                f"unknown axis {name!r}; choose from {SWEEP_AXES}")
    if name1 == name2:
        raise InvalidParameterError("the two axes must differ")
    rows = []
    for v1 in vals1:
        for v2 in vals2:
            pt = _apply_axes(base, {name1: float(v1), name2: float(v2)})
            rep = evaluate_point(pt, constants)
            rows.append(RegionRow(
                axis1=float(v1), axis2=float(v2), theta_max=rep.theta_max,
                t_total=rep.t_total, gamma_required=rep.gamma_zeno_required,
                sigma_ratio=rep.sigma_ratio, mfp=rep.mfp,
                KE_eV=rep.kinetic_energy_eV, passed=rep.passed))
    return rows


def region_to_csv(rows, fh, header_comment: str | None = None):
    """CSV: axis1,axis2,theta_max,t_total,gamma_required,sigma_ratio,mfp,KE_eV,pass."""
    if header_comment:
        fh.write(f"# {header_comment}\n")
    fh.write("axis1,axis2,theta_max,t_total,gamma_required,"
             "sigma_ratio,mfp,KE_eV,pass\n")
    for r in rows:
        fh.write(f"{r.axis1:.9g},{r.axis2:.9g},{r.theta_max:.9g},"
                 f"{r.t_total:.9g},{r.gamma_required:.9g},{r.sigma_ratio:.9g},"
                 f"{r.mfp:.9g},{r.KE_eV:.9g},{int(r.passed)}\n")
