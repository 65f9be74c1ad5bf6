"""Source mass distributions built from weighted uniform spheres.

A delocalized source is represented as a finite set of uniform spheres:
each sphere carries the probability weight of one position of the source's
centre of mass, so the effective potential felt by a probe is the plain
Newtonian potential of the weighted collection.  The canonical case is the
symmetric two-position superposition: two spheres of half the total mass
on the x axis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import CONST, PhysicalConstants
from .errors import InvalidParameterError

_TOTAL_MASS_RTOL = 1e-12


@dataclass(frozen=True)
class SphereComponent:
    """One uniform sphere: center (m, 3-vector), radius (m), mass (kg)."""

    center: tuple[float, float, float]
    radius: float
    mass: float

    def __post_init__(self):
        if len(self.center) != 3:
            raise InvalidParameterError("center must be a 3-vector")
        object.__setattr__(self, "center", tuple(float(x) for x in self.center))
        if self.radius <= 0:
            raise InvalidParameterError(f"radius must be > 0, got {self.radius}")
        if self.mass <= 0:
            raise InvalidParameterError(f"mass must be > 0, got {self.mass}")


@dataclass(frozen=True)
class MassDistribution:
    """Weighted collection of uniform spheres; immutable after construction."""

    components: tuple[SphereComponent, ...]
    total_mass: float = field(default=None)  # kg; defaults to sum of components

    def __post_init__(self):
        if not self.components:
            raise InvalidParameterError("need at least one sphere component")
        object.__setattr__(self, "components", tuple(self.components))
        msum = sum(c.mass for c in self.components)
        if self.total_mass is None:
            object.__setattr__(self, "total_mass", msum)
        elif abs(self.total_mass - msum) > _TOTAL_MASS_RTOL * msum:
            raise InvalidParameterError(
                f"total_mass {self.total_mass} != sum of component masses {msum}")
        if self._has_overlap():
            warnings.warn("sphere components overlap; fields still superpose "
                          "but the two-position source model assumes disjoint lobes",
                          stacklevel=3)

    def _has_overlap(self) -> bool:
        comps = self.components
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                sep = np.linalg.norm(np.subtract(comps[i].center, comps[j].center))
                if sep < comps[i].radius + comps[j].radius:
                    return True
        return False

    def barycenter(self) -> np.ndarray:
        w = np.array([c.mass for c in self.components])
        pts = np.array([c.center for c in self.components])
        return (w[:, None] * pts).sum(axis=0) / w.sum()

    def length_scale(self) -> float:
        """Max of component radii and pairwise center separations (m)."""
        comps = self.components
        scale = max(c.radius for c in comps)
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                sep = float(np.linalg.norm(
                    np.subtract(comps[i].center, comps[j].center)))
                scale = max(scale, sep)
        return scale

    def to_dict(self) -> dict:
        return {"components": [{"center": list(c.center),
                                "radius": c.radius,
                                "mass": c.mass} for c in self.components]}

    @classmethod
    def from_dict(cls, data: dict) -> "MassDistribution":
        comps = [SphereComponent(tuple(c["center"]), c["radius"], c["mass"])
                 for c in data["components"]]
        return cls(tuple(comps))


def make_superposed_source(R: float, density: float, d: float) -> MassDistribution:
    """Two-position superposed sphere: lobes of mass M/2 at x = -d/2 and +d/2.

    Parameters
    ----------
    R : sphere radius (m)
    density : material density (kg/m^3); M = (4/3) pi density R^3
    d : separation of the two positions (m); d = 0 collapses to a single
        sphere of mass M at the origin.
    """
    if R <= 0:
        raise InvalidParameterError(f"R must be > 0, got {R}")
    if density <= 0:
        raise InvalidParameterError(f"density must be > 0, got {density}")
    if d < 0:
        raise InvalidParameterError(f"d must be >= 0, got {d}")
    M = 4.0 / 3.0 * np.pi * density * R**3
    if d == 0:
        return MassDistribution((SphereComponent((0.0, 0.0, 0.0), R, M),))
    return MassDistribution((
        SphereComponent((-d / 2, 0.0, 0.0), R, M / 2),
        SphereComponent((+d / 2, 0.0, 0.0), R, M / 2),
    ))


def potential_at(dist: MassDistribution, x, m_probe: float,
                 constants: PhysicalConstants = CONST) -> float:
    """Gravitational potential energy (J) of a point probe at position x.

    Exterior of a component the sphere acts as a point mass; in the
    interior the exact uniform-sphere form -G m M (3R^2 - s^2)/(2R^3)
    keeps grazing/penetrating trajectories well defined.
    """
    x = np.asarray(x, dtype=float)
    Gm = constants.G * m_probe
    V = 0.0
    for comp in dist.components:
        s = float(np.linalg.norm(x - np.asarray(comp.center)))
        R = comp.radius
        if s >= R:
            V -= Gm * comp.mass / s
        else:
            V -= Gm * comp.mass * (3 * R**2 - s**2) / (2 * R**3)
    return V


def force_at(dist: MassDistribution, x, m_probe: float,
             constants: PhysicalConstants = CONST) -> np.ndarray:
    """Gravitational force (N, 3-vector) on a point probe at position x.

    Analytic gradient of :func:`potential_at`: -G m M (x-c)/s^3 outside a
    component, -G m M (x-c)/R^3 inside (linear restoring field).
    """
    x = np.asarray(x, dtype=float)
    Gm = constants.G * m_probe
    F = np.zeros(3)
    for comp in dist.components:
        r = x - np.asarray(comp.center)
        s = float(np.linalg.norm(r))
        R = comp.radius
        if s == 0.0:
            continue  # exactly at a center: symmetric, zero contribution
        if s >= R:
            F -= Gm * comp.mass * r / s**3
        else:
            F -= Gm * comp.mass * r / R**3
    return F
