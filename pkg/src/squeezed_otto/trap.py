"""Tapered linear Paul trap: geometry, pseudopotential forces, energy shares.

The radial confinement weakens along +z because the electrode distance grows
linearly with the funnel half-angle theta:

    r_el(z)      = r0 + z tan(theta)
    omega_rad(z) = omega_rad0 (r0 / r_el(z))^2 + modulation

The modulation offset is the knob of the parametric squeeze protocol; it is
zero during ordinary engine strokes.  Potential and forces:

    V(z, x) = (1/2) m omega_ax^2 z^2 + (1/2) m omega_rad(z)^2 x^2
    Fx      = -m omega_rad(z)^2 x
    Fz      = -m omega_ax^2 z - (1/2) m d(omega_rad^2)/dz x^2

The x^2 term in Fz pushes the ion toward weaker confinement; it is the
mechanism that converts radial heat into axial motion.  The radial energy
share E_rad = px^2/(2m) + (1/2) m omega_rad(z)^2 x^2 is the working-fluid
energy; the axial share stores the produced work.

All position/momentum arguments broadcast as numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CA40_MASS

_TWO_PI = 2.0 * math.pi


class InfeasibleGeometryError(ValueError):
    """Requested operating point cannot be realized inside the trap."""


@dataclass(frozen=True)
class TrapGeometry:
    """Static trap parameters (SI).

    Attributes
    ----------
    omega_ax : float
        Axial angular frequency (rad/s).
    omega_rad0 : float
        Radial angular frequency at z = 0 (rad/s), must exceed omega_ax.
    theta : float
        Taper half-angle (rad), in (0, pi/2).
    r0 : float
        Radial electrode distance at z = 0 (m).
    ion_mass : float
        Ion mass (kg).
    a_max : float
        Largest allowed axial excursion (m), < 1 mm.
    """

    omega_ax: float
    omega_rad0: float
    theta: float
    r0: float
    ion_mass: float
    a_max: float

    def __post_init__(self) -> None:
        if not (self.omega_rad0 > self.omega_ax > 0.0):
            raise ValueError(
                f"need omega_rad0 > omega_ax > 0, got {self.omega_rad0}, {self.omega_ax}"
            )
        if not (0.0 < self.theta < math.pi / 2.0):
            raise ValueError(f"taper half-angle must lie in (0, pi/2), got {self.theta}")
        if self.r0 <= 0.0:
            raise ValueError(f"electrode distance must be positive, got {self.r0}")
        if self.ion_mass <= 0.0:
            raise ValueError(f"ion mass must be positive, got {self.ion_mass}")
        if not (0.0 < self.a_max < 1e-3):
            raise ValueError(f"a_max must lie in (0, 1 mm), got {self.a_max}")

    @property
    def radial_period(self) -> float:
        """Radial oscillation period at z = 0 (s)."""
        return _TWO_PI / self.omega_rad0

    @property
    def axial_period(self) -> float:
        """Axial oscillation period (s)."""
        return _TWO_PI / self.omega_ax


@dataclass(frozen=True)
class PhasePoint:
    """Single-trajectory state: axial and radial position/momentum (SI)."""

    z: float
    pz: float
    x: float
    px: float


def default_geometry() -> TrapGeometry:
    """Tapered-trap parameters of the reference setup.

    omega_rad0 = 2pi x 3 MHz, omega_ax = 2pi x 36 kHz, theta = 20 deg,
    r0 = 1.5 mm, Ca-40 ion, a_max = 0.9 mm.
    """
    return TrapGeometry(
        omega_ax=_TWO_PI * 36e3,
        omega_rad0=_TWO_PI * 3e6,
        theta=math.radians(20.0),
        r0=1.5e-3,
        ion_mass=CA40_MASS,
        a_max=0.9e-3,
    )


# ---------------------------------------------------------------------------
# frequency profile and forces
# ---------------------------------------------------------------------------

def electrode_distance(geom: TrapGeometry, z):
    """Local radial electrode distance r0 + z tan(theta) (m); must stay > 0."""
    d = geom.r0 + np.asarray(z, dtype=float) * math.tan(geom.theta)
    if np.any(d <= 0.0):
        raise ValueError("ion beyond the funnel apex: electrode distance <= 0")
    return float(d) if np.ndim(d) == 0 else d


def radial_frequency(geom: TrapGeometry, z, modulation=0.0):
    """Position-dependent radial angular frequency (rad/s).

    omega_rad0 (r0/(r0 + z tan theta))^2 + modulation; strictly decreasing
    in z at zero modulation.
    """
    u = geom.r0 / electrode_distance(geom, z)
    out = geom.omega_rad0 * u * u + modulation
    return float(out) if np.ndim(out) == 0 else out


def radial_stiffness_gradient(geom: TrapGeometry, z, modulation=0.0):
    """Analytic d(omega_rad^2)/dz (rad^2/s^2 per m) at the given modulation."""
    u = geom.r0 / electrode_distance(geom, z)
    w = geom.omega_rad0 * u * u + modulation
    # d(w^2)/dz = 2 w dw/dz, dw/dz = -2 omega_rad0 u^3 tan(theta)/r0
    out = -4.0 * w * geom.omega_rad0 * u**3 * math.tan(geom.theta) / geom.r0
    return float(out) if np.ndim(out) == 0 else out


def force(geom: TrapGeometry, z, x, modulation=0.0):
    """Conservative force components (Fz, Fx) in N at (z, x).

    Exact negative gradient of potential_energy, including the taper
    reaction term -(1/2) m d(omega_rad^2)/dz x^2 along z.
    """
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    w = radial_frequency(geom, z, modulation)
    fx = -geom.ion_mass * np.asarray(w, dtype=float) ** 2 * x
    fz = (-geom.ion_mass * geom.omega_ax**2 * z
          - 0.5 * geom.ion_mass * np.asarray(radial_stiffness_gradient(geom, z, modulation),
                                             dtype=float) * x**2)
    if np.ndim(fz) == 0:
        return float(fz), float(fx)
    return fz, fx


def force_at(geom: TrapGeometry, p: PhasePoint, modulation=0.0):
    """Force tuple (Fz, Fx) at a single phase point."""
    return force(geom, p.z, p.x, modulation)


# ---------------------------------------------------------------------------
# energy bookkeeping
# ---------------------------------------------------------------------------

def potential_energy(geom: TrapGeometry, z, x, modulation=0.0):
    """Trap potential energy (J) at (z, x)."""
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    w = np.asarray(radial_frequency(geom, z, modulation), dtype=float)
    out = 0.5 * geom.ion_mass * (geom.omega_ax**2 * z**2 + w**2 * x**2)
    return float(out) if np.ndim(out) == 0 else out


def radial_energy(geom: TrapGeometry, z, x, px, modulation=0.0):
    """Working-fluid energy share px^2/(2m) + (1/2) m omega_rad(z)^2 x^2 (J)."""
    x = np.asarray(x, dtype=float)
    px = np.asarray(px, dtype=float)
    w = np.asarray(radial_frequency(geom, z, modulation), dtype=float)
    out = px**2 / (2.0 * geom.ion_mass) + 0.5 * geom.ion_mass * w**2 * x**2
    return float(out) if np.ndim(out) == 0 else out


def axial_energy(geom: TrapGeometry, z, pz):
    """Axial energy share pz^2/(2m) + (1/2) m omega_ax^2 z^2 (J)."""
    z = np.asarray(z, dtype=float)
    pz = np.asarray(pz, dtype=float)
    out = pz**2 / (2.0 * geom.ion_mass) + 0.5 * geom.ion_mass * geom.omega_ax**2 * z**2
    return float(out) if np.ndim(out) == 0 else out


def total_energy(geom: TrapGeometry, z, pz, x, px, modulation=0.0):
    """Total mechanical energy (J): potential plus both kinetic shares."""
    pz = np.asarray(pz, dtype=float)
    px = np.asarray(px, dtype=float)
    out = (potential_energy(geom, z, x, modulation)
           + (pz**2 + px**2) / (2.0 * geom.ion_mass))
    return float(out) if np.ndim(out) == 0 else out


def total_energy_at(geom: TrapGeometry, p: PhasePoint, modulation=0.0) -> float:
    """Total mechanical energy (J) of a single phase point."""
    return total_energy(geom, p.z, p.pz, p.x, p.px, modulation)


# ---------------------------------------------------------------------------
# operating-point helpers
# ---------------------------------------------------------------------------

def amplitude_for_ratio(geom: TrapGeometry, ratio: float) -> float:
    """Axial amplitude A realizing omega_rad(-A)/omega_rad(+A) = ratio.

    Transport between the turning points -A and +A then modulates the radial
    frequency by the requested factor.  Raises InfeasibleGeometryError when
    the amplitude would exceed a_max.
    """
    if ratio <= 1.0:
        raise ValueError(f"frequency ratio must exceed 1, got {ratio}")
    root = math.sqrt(ratio)
    a = geom.r0 / math.tan(geom.theta) * (root - 1.0) / (root + 1.0)
    if a > geom.a_max:
        raise InfeasibleGeometryError(
            f"ratio {ratio:.4f} needs axial amplitude {a * 1e3:.3f} mm "
            f"> a_max {geom.a_max * 1e3:.3f} mm"
        )
    return a
