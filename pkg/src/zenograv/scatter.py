"""Classical probe scattering in the field of a sphere-superposition source.

Trajectories are integrated with an adaptive embedded Runge-Kutta 5(4)
scheme (scipy's RK45, relative tolerance 1e-9 per step by default); the
launch plane at z_start and the escape radius r_stop are finite stand-ins
for the asymptotic scattering problem.  Closed-form hyperbolic-orbit
expressions (deflection angle, time of flight between true anomalies) are
provided both as fast estimators and as independent oracles for the
integrator.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .constants import CONST, PhysicalConstants
from .errors import (IntegratorFailureError, InvalidParameterError,
                     ProjectionSingularError, UnterminatedTrajectoryError)
from .massdist import MassDistribution, potential_at

DEFAULT_RTOL = 1e-9
# atol = ATOL_FACTOR * rtol * characteristic scale, separately for position
# and velocity; keeps the transverse velocity (the signal, ~theta*v) under
# tight control even though it is orders of magnitude below the speed.
ATOL_FACTOR = 1e-4


@dataclass(frozen=True)
class ScatterConfig:
    """Launch and termination parameters for one probe.

    The probe starts at (l, b, z_start) with velocity (0, 0, v): b is the
    impact parameter (y offset), l the offset along the source's
    delocalization axis (x).
    """

    b: float                 # impact parameter (m)
    l: float                 # offset along x (m)
    v: float                 # launch speed along +z (m/s)
    z_start: float           # launch z, negative (m)
    dt_max: float            # max integrator step (s)
    t_max: float             # integration cutoff (s)
    r_stop: float            # escape radius (m)
    rtol: float = DEFAULT_RTOL

    def __post_init__(self):
        if self.v <= 0:
            raise InvalidParameterError(f"v must be > 0, got {self.v}")
        if self.z_start >= 0:
            raise InvalidParameterError(f"z_start must be < 0, got {self.z_start}")
        if self.dt_max <= 0:
            raise InvalidParameterError(f"dt_max must be > 0, got {self.dt_max}")
        if self.t_max <= 0:
            raise InvalidParameterError(f"t_max must be > 0, got {self.t_max}")
        if self.r_stop <= abs(self.z_start):
            raise InvalidParameterError(
                f"r_stop ({self.r_stop}) must exceed |z_start| ({-self.z_start})")

    @classmethod
    def for_source(cls, dist: MassDistribution, b: float, l: float, v: float,
                   *, start_factor: float = 50.0, stop_factor: float = 100.0,
                   rtol: float = DEFAULT_RTOL) -> "ScatterConfig":
        """Config with termination scales set from the source geometry.

        z_start = -start_factor * scale and r_stop = stop_factor * scale,
        where scale is the larger of the component radii and separations.
        The defaults truncate the incoming/outgoing asymptotes at the
        <~1e-3 relative level in the deflection angle; raise the factors
        when comparing against asymptotic closed forms.
        """
        scale = dist.length_scale()
        z_start = -start_factor * scale
        r_stop = stop_factor * scale
        launch = math.sqrt(b * b + l * l + z_start * z_start)
        r_stop = max(r_stop, 1.5 * launch)
        return cls(b=b, l=l, v=v, z_start=z_start,
                   dt_max=scale / v,
                   t_max=50.0 * (abs(z_start) + r_stop) / v,
                   r_stop=r_stop, rtol=rtol)


@dataclass(frozen=True)
class ProbeTrajectory:
    """Integrated probe path plus derived scattering quantities."""

    t: np.ndarray            # (n,) sample times (s)
    x: np.ndarray            # (n, 3) positions (m)
    v: np.ndarray            # (n, 3) velocities (m/s)
    hit_source: bool
    deflection_angle: float  # rad, in [0, pi]
    outgoing_dir: np.ndarray  # unit 3-vector

    @property
    def samples(self):
        """Time-ordered (t, x, v) triples."""
        return list(zip(self.t, self.x, self.v))


@dataclass(frozen=True)
class PatternPoint:
    beta: float
    l: float
    b: float
    theta: float
    proj: tuple[float, float]
    hit: bool
    error: str | None = None


@dataclass(frozen=True)
class ScatterPattern:
    """Outgoing-direction pattern of a probe grid, stereographically projected."""

    records: tuple[PatternPoint, ...]   # every launched probe, grid order
    projection_pole: str = "(0,0,-1), plane tangent at +z, scale 2"

    @property
    def points(self):
        """Clean pattern points: excludes source hits and failed integrations."""
        return [p for p in self.records if not p.hit and p.error is None]

    @property
    def n_hit(self):
        return sum(1 for p in self.records if p.hit)


def _acceleration_terms(dist: MassDistribution, constants: PhysicalConstants):
    """(cx, cy, cz, R, G*M) per component, for the tight RHS loop."""
    return [(c.center[0], c.center[1], c.center[2], c.radius,
             constants.G * c.mass) for c in dist.components]


def integrate_trajectory(dist: MassDistribution, cfg: ScatterConfig,
                         m_probe: float,
                         constants: PhysicalConstants = CONST) -> ProbeTrajectory:
    """Integrate one probe through the source field until escape.

    Integration runs until |x| crosses r_stop moving outward, or t_max is
    exceeded (UnterminatedTrajectoryError, carrying the partial
    trajectory).  A probe that enters a sphere component keeps evolving in
    the interior field but is flagged ``hit_source``; entry is detected on
    every accepted-step segment, not just at the sample points.

    The acceleration is independent of m_probe (equivalence principle);
    the probe mass only enters energy bookkeeping.
    """
    terms = _acceleration_terms(dist, constants)

    def rhs(t, y):
        x, yy, z, vx, vy, vz = y
        ax = ay = az = 0.0
        for (cx, cy, cz, R, GM) in terms:
            dx = x - cx
            dy = yy - cy
            dz = z - cz
            s2 = dx * dx + dy * dy + dz * dz
            s = math.sqrt(s2)
            f = -GM / (s2 * s) if s >= R else -GM / (R * R * R)
            ax += f * dx
            ay += f * dy
            az += f * dz
        return (vx, vy, vz, ax, ay, az)

    def escape(t, y):
        return math.sqrt(y[0] ** 2 + y[1] ** 2 + y[2] ** 2) - cfg.r_stop
    escape.terminal = True
    escape.direction = 1.0   # outward crossing only

    y0 = [cfg.l, cfg.b, cfg.z_start, 0.0, 0.0, cfg.v]
    scale_pos = max(abs(cfg.z_start), abs(cfg.b) + abs(cfg.l))
    atol = [ATOL_FACTOR * cfg.rtol * scale_pos] * 3 \
        + [ATOL_FACTOR * cfg.rtol * cfg.v] * 3

    sol = solve_ivp(rhs, (0.0, cfg.t_max), y0, method="RK45",
                    rtol=cfg.rtol, atol=atol, max_step=cfg.dt_max,
                    events=escape, dense_output=False)

    t = sol.t
    pos = sol.y[:3].T.copy()
    vel = sol.y[3:].T.copy()
    if not np.all(np.isfinite(sol.y)):
        raise IntegratorFailureError("non-finite state during integration")

    hit = _hit_on_path(pos, dist)
    v_in = np.array([0.0, 0.0, cfg.v])
    v_out = vel[-1]
    theta = _angle_between(v_in, v_out)
    out_dir = v_out / np.linalg.norm(v_out)
    traj = ProbeTrajectory(t=t, x=pos, v=vel, hit_source=hit,
                           deflection_angle=theta, outgoing_dir=out_dir)

    if sol.status == 0:
        raise UnterminatedTrajectoryError(
            f"probe did not escape r_stop={cfg.r_stop} within t_max={cfg.t_max}",
            trajectory=traj)
    if sol.status < 0:
        raise IntegratorFailureError(f"integrator failed: {sol.message}")
    return traj


def _angle_between(a, b) -> float:
    cross = np.linalg.norm(np.cross(a, b))
    dot = float(np.dot(a, b))
    return math.atan2(cross, dot)


def _hit_on_path(pos: np.ndarray, dist: MassDistribution) -> bool:
    """True if any accepted-step segment passes inside a sphere component."""
    for comp in dist.components:
        c = np.asarray(comp.center)
        a = pos[:-1] - c
        seg = pos[1:] - pos[:-1]
        seg2 = np.einsum("ij,ij->i", seg, seg)
        tstar = np.where(seg2 > 0.0,
                         np.clip(-np.einsum("ij,ij->i", a, seg)
                                 / np.where(seg2 > 0, seg2, 1.0), 0.0, 1.0),
                         0.0)
        nearest = a + tstar[:, None] * seg
        d2 = np.einsum("ij,ij->i", nearest, nearest)
        if np.any(d2 < comp.radius ** 2):
            return True
    return False


def energy_series(dist: MassDistribution, traj: ProbeTrajectory, m_probe: float,
                  constants: PhysicalConstants = CONST) -> np.ndarray:
    """Total energy E = m|v|^2/2 + V(x) at every sample (J)."""
    kin = 0.5 * m_probe * np.einsum("ij,ij->i", traj.v, traj.v)
    pot = np.array([potential_at(dist, x, m_probe, constants) for x in traj.x])
    return kin + pot


# ---------------------------------------------------------------------------
# Closed-form hyperbolic-orbit expressions
# ---------------------------------------------------------------------------

def rutherford_angle(M: float, v: float, b0: float,
                     constants: PhysicalConstants = CONST) -> float:
    """Deflection angle 2*acot(v^2 b0 / (G M)) off a point mass M (rad)."""
    if M <= 0 or v <= 0 or b0 <= 0:
        raise InvalidParameterError("M, v, b0 must all be > 0")
    return 2.0 * math.atan(constants.G * M / (v * v * b0))


def rutherford_angle_density(rho: float, beta: float, t_R: float,
                             approx: bool = False,
                             constants: PhysicalConstants = CONST) -> float:
    """Max deflection in the (density, beta, t_R) parametrization (rad).

    For a sphere of density rho probed at impact parameter beta*R with
    speed R/t_R the radius cancels: the exact angle is
    2*atan((4 pi G rho / (3 beta)) t_R^2); ``approx=True`` returns the
    small-angle form (8 pi G rho / (3 beta)) t_R^2.
    """
    if rho <= 0 or beta <= 0 or t_R <= 0:
        raise InvalidParameterError("rho, beta, t_R must all be > 0")
    x = 4.0 * np.pi * constants.G * rho * t_R**2 / (3.0 * beta)
    return 2.0 * x if approx else 2.0 * math.atan(x)


def hyperbolic_time_from_anomaly(e: float, phi: float, h: float, GM: float) -> float:
    """Time (s) from periapsis to true anomaly phi on a hyperbolic orbit.

    h is the angular momentum per unit mass (m^2/s), GM the gravitational
    parameter (m^3/s^2).  Valid for 0 <= phi < phi_inf = acos(-1/e).
    """
    if e <= 1.0:
        raise InvalidParameterError(f"orbit not hyperbolic: e = {e} <= 1")
    if phi < 0:
        raise InvalidParameterError(f"phi must be >= 0, got {phi}")
    tn = math.tan(phi / 2.0)
    sqep = math.sqrt(e + 1.0)
    sqem = math.sqrt(e - 1.0)
    if sqem * tn >= sqep:
        raise InvalidParameterError("phi at or beyond the asymptotic anomaly")
    e2m1 = e * e - 1.0
    term1 = e * math.sin(phi) / (e2m1 * (1.0 + e * math.cos(phi)))
    term2 = math.log((sqep + sqem * tn) / (sqep - sqem * tn)) / e2m1**1.5
    return (h**3 / GM**2) * (term1 - term2)


def kepler_scatter_time(M: float, rho: float, beta: float, zeta: float,
                        t_R: float,
                        constants: PhysicalConstants = CONST) -> float:
    """Scattering duration: twice the periapsis-to-zeta*phi_inf flight time (s).

    The probe's hyperbola is fixed by (rho, beta, t_R): impact parameter
    b0 = beta*R, speed v = R/t_R with R the sphere radius implied by
    (M, rho).  phi_inf is the asymptotic true anomaly, related to the
    deflection angle theta by theta = 2*phi_inf - pi, equivalently
    e = -1/cos(phi_inf) = 1/sin(theta/2).
    """
    if beta <= 1.0:
        raise InvalidParameterError(f"beta must be > 1, got {beta}")
    if not 0.0 < zeta < 1.0:
        raise InvalidParameterError(f"zeta must be in (0, 1), got {zeta}")
    if t_R <= 0 or M <= 0 or rho <= 0:
        raise InvalidParameterError("M, rho, t_R must all be > 0")
    theta = rutherford_angle_density(rho, beta, t_R, constants=constants)
    phi_inf = 0.5 * (np.pi + theta)
    e = -1.0 / math.cos(phi_inf)
    R = (3.0 * M / (4.0 * np.pi * rho)) ** (1.0 / 3.0)
    h = (R / t_R) * (beta * R)       # v * b0
    t_half = hyperbolic_time_from_anomaly(e, zeta * phi_inf, h, constants.G * M)
    return 2.0 * t_half


# ---------------------------------------------------------------------------
# Stereographic projection and pattern scans
# ---------------------------------------------------------------------------

def stereographic_project(outgoing_dir) -> np.ndarray:
    """Project a unit direction from the pole (0,0,-1) onto the z=+1 plane.

    (0,0,1) maps to the origin, the equator to the circle of radius 2; a
    small deflection theta lands at radius 2*tan(theta/2) ~ theta.
    """
    u = np.asarray(outgoing_dir, dtype=float)
    norm = np.linalg.norm(u)
    if abs(norm - 1.0) > 1e-9:
        raise InvalidParameterError(f"direction must be unit length, |u| = {norm}")
    if 1.0 + u[2] < 1e-12:
        raise ProjectionSingularError("direction at the projection pole (0,0,-1)")
    return np.array([2.0 * u[0] / (1.0 + u[2]), 2.0 * u[1] / (1.0 + u[2])])


def _scan_task(args):
    dist_dict, beta, l, b, v, m_probe, start_factor, stop_factor, rtol = args
    dist = MassDistribution.from_dict(dist_dict)
    cfg = ScatterConfig.for_source(dist, b=b, l=l, v=v,
                                   start_factor=start_factor,
                                   stop_factor=stop_factor, rtol=rtol)
    try:
        traj = integrate_trajectory(dist, cfg, m_probe)
        proj = stereographic_project(traj.outgoing_dir)
        return PatternPoint(beta=beta, l=l, b=b, theta=traj.deflection_angle,
                            proj=(float(proj[0]), float(proj[1])),
                            hit=traj.hit_source)
    except (UnterminatedTrajectoryError, IntegratorFailureError,
            ProjectionSingularError) as exc:
        return PatternPoint(beta=beta, l=l, b=b, theta=float("nan"),
                            proj=(float("nan"), float("nan")),
                            hit=False, error=f"{type(exc).__name__}: {exc}")


def scan_pattern(dist: MassDistribution, beta_range, l_range, n_b: int,
                 n_l: int, v: float, m_probe: float, *,
                 mirror_l: bool = True, n_workers: int = 1,
                 start_factor: float = 50.0, stop_factor: float = 100.0,
                 rtol: float = DEFAULT_RTOL) -> ScatterPattern:
    """Launch a (beta, l) grid of probes and collect projected outgoing angles.

    Impact parameters are b = beta * R with R the largest component
    radius; with ``mirror_l`` every offset l > 0 is also launched at -l.
    Probes that hit the source stay in ``records`` (flagged) but are
    excluded from ``points``; per-point integration failures are recorded
    without aborting the scan.  Results are merged in grid order, so the
    output is deterministic for any worker count.
    """
    if n_b < 1 or n_l < 1:
        raise InvalidParameterError("n_b and n_l must be >= 1")
    b_lo, b_hi = beta_range
    l_lo, l_hi = l_range
    if b_lo <= 0 or b_hi < b_lo or l_lo < 0 or l_hi < l_lo:
        raise InvalidParameterError("invalid beta_range or l_range")
    R = max(c.radius for c in dist.components)
    betas = np.linspace(b_lo, b_hi, n_b)
    ls = np.linspace(l_lo, l_hi, n_l)

    dist_dict = dist.to_dict()
    tasks = []
    for beta in betas:
        for l in ls:
            offsets = (l, -l) if (mirror_l and l > 0) else (l,)
            for off in offsets:
                tasks.append((dist_dict, float(beta), float(off),
                              float(beta * R), v, m_probe,
                              start_factor, stop_factor, rtol))

    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            records = list(pool.map(_scan_task, tasks, chunksize=16))
    else:
        records = [_scan_task(t) for t in tasks]
    return ScatterPattern(records=tuple(records))


def make_collapsed_sources(R: float, density: float, d: float):
    """The two localized alternatives: one full-mass sphere at -d/2 or +d/2."""
    M = 4.0 / 3.0 * np.pi * density * R**3
    left = MassDistribution.from_dict(
        {"components": [{"center": [-d / 2, 0.0, 0.0], "radius": R, "mass": M}]})
    right = MassDistribution.from_dict(
        {"components": [{"center": [+d / 2, 0.0, 0.0], "radius": R, "mass": M}]})
    return left, right


def collapsed_scatter(dist_left: MassDistribution, dist_right: MassDistribution,
                      cfg: ScatterConfig, m_probe: float, which: str,
                      constants: PhysicalConstants = CONST) -> ProbeTrajectory:
    """Scatter off one localized alternative selected by the coin ``which``.

    Models the per-probe collapsed situation: each probe sees the full
    mass at a single position, producing a bimodal trajectory set instead
    of the single frozen-source pattern.
    """
    if which not in ("left", "right"):
        raise InvalidParameterError(f'which must be "left" or "right", got {which!r}')
    dist = dist_left if which == "left" else dist_right
    return integrate_trajectory(dist, cfg, m_probe, constants)


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def pattern_rows(pattern: ScatterPattern):
    """CSV rows beta,l,b,theta_rad,proj_x,proj_y,hit, one per launched probe."""
    for p in pattern.records:
        yield (p.beta, p.l, p.b, p.theta, p.proj[0], p.proj[1], int(p.hit))


def pattern_to_csv(pattern: ScatterPattern, fh, header_comment: str | None = None):
    if header_comment:
        fh.write(f"# {header_comment}\n")
    fh.write("beta,l,b,theta_rad,proj_x,proj_y,hit\n")
    for beta, l, b, theta, px, py, hit in pattern_rows(pattern):
        fh.write(f"{beta:.9g},{l:.9g},{b:.9g},{theta:.9g},{px:.9g},{py:.9g},{hit}\n")


def pattern_to_svg(pattern: ScatterPattern, fh, dashed_radius: float | None = None,
                   size: int = 640, header_comment: str | None = None):
    """Static SVG of the projected pattern, colored by the sign of l.

    A dashed circle (the closed-form maximum-deflection radius) can be
    overlaid for comparison with the simulated points.
    """
    pts = pattern.points
    rmax = max([math.hypot(*p.proj) for p in pts] + [dashed_radius or 0.0])
    if rmax <= 0:
        rmax = 1.0
    pad = 1.15
    scale = (size / 2.0) / (rmax * pad)

    def sx(val):
        return size / 2.0 + val * scale

    def sy(val):
        return size / 2.0 - val * scale

    fh.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    if header_comment:
        fh.write(f"<!-- {header_comment} -->\n")
    fh.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
             f'height="{size}" viewBox="0 0 {size} {size}">\n')
    fh.write(f'<rect width="{size}" height="{size}" fill="white"/>\n')
    fh.write(f'<line x1="0" y1="{size/2}" x2="{size}" y2="{size/2}" '
             'stroke="#cccccc" stroke-width="1"/>\n')
    fh.write(f'<line x1="{size/2}" y1="0" x2="{size/2}" y2="{size}" '
             'stroke="#cccccc" stroke-width="1"/>\n')
    if dashed_radius:
        fh.write(f'<circle cx="{size/2}" cy="{size/2}" r="{dashed_radius*scale:.2f}" '
                 'fill="none" stroke="black" stroke-width="1" '
                 'stroke-dasharray="6,4"/>\n')
    for p in pts:
        color = "#d62728" if p.l > 0 else ("#1f77b4" if p.l < 0 else "#2ca02c")
        fh.write(f'<circle cx="{sx(p.proj[0]):.2f}" cy="{sy(p.proj[1]):.2f}" '
                 f'r="2" fill="{color}" fill-opacity="0.7"/>\n')
    fh.write("</svg>\n")
