"""Fixed-step integrators for ensemble trajectories (vectorized over numpy arrays).

Second-order partitioned Runge-Kutta (leapfrog) steps for the conservative
dynamics, and a Strang splitting with an exact Ornstein-Uhlenbeck momentum
update for thermal contact.  All functions mutate the passed state arrays in
place; every stroke duration is honored exactly by shrinking dt to an integer
number of steps (never exceeding the requested dt_max).
"""

from __future__ import annotations

import math

import numpy as np

from .constants import K_BOLTZMANN
from .trap import TrapGeometry, force


def split_steps(duration: float, dt_max: float) -> tuple[int, float]:
    """Number of steps and exact step size covering duration with dt <= dt_max."""
    if duration < 0.0 or dt_max <= 0.0:
        raise ValueError("duration must be >= 0 and dt_max > 0")
    if duration == 0.0:
        return 0, 0.0
    n = max(1, math.ceil(duration / dt_max))
    return n, duration / n


def evolve_taper_2d(geom: TrapGeometry, z, pz, x, px, duration: float,
                    dt_max: float, flags=None) -> None:
    """Conservative 2D evolution through the tapered trap (kick-drift-kick).

    Advances (z, pz, x, px) in place for the given duration.  If flags is a
    boolean array, trajectories with |z| > a_max are flagged (never clamped).
    """
    n, dt = split_steps(duration, dt_max)
    if n == 0:
        return
    m = geom.ion_mass
    half = 0.5 * dt
    fz, fx = force(geom, z, x)
    for _ in range(n):
        pz += half * fz
        px += half * fx
        z += (dt / m) * pz
        x += (dt / m) * px
        fz, fx = force(geom, z, x)
        pz += half * fz
        px += half * fx
        if flags is not None:
            np.logical_or(flags, np.abs(z) > geom.a_max, out=flags)


def evolve_radial_const(mass: float, omega, x, px, duration: float,
                        dt_max: float) -> None:
    """Radial leapfrog at a fixed frequency (axial coordinate frozen).

    omega may be an array (per-trajectory stiffness) broadcasting with x/px.
    """
    if np.any(np.asarray(omega) <= 0.0):
        raise ValueError("radial frequency must be positive")
    n, dt = split_steps(duration, dt_max)
    if n == 0:
        return
    k = mass * np.asarray(omega, dtype=float) ** 2
    half_k = 0.5 * dt * k
    for _ in range(n):
        px -= half_k * x
        x += (dt / mass) * px
        px -= half_k * x


def evolve_radial_ramp(mass: float, omega_of_s, x, px, duration: float,
                       dt_max: float) -> None:
    """Radial leapfrog with a time-dependent frequency schedule at frozen z.

    omega_of_s maps scaled time s in [0, 1] to rad/s; sampled at midstep
    (drift-kick-drift), matching the Q* Hill-equation integrator.
    """
    n, dt = split_steps(duration, dt_max)
    if n == 0:
        return
    half = 0.5 * dt / mass
    for k in range(n):
        w = float(omega_of_s((k + 0.5) / n))
        if w <= 0.0:
            raise ValueError("frequency schedule must stay positive")
        x += half * px
        px -= dt * mass * w * w * x
        x += half * px


def langevin_radial(mass: float, omega, gamma: float, temperature: float,
                    x, px, dt: float, noise) -> None:
    """BAOAB steps: leapfrog with an exact OU momentum refresh at midstep.

    noise is an (n_steps, n_traj) array of standard normals, one row per
    step.  The OU coefficients exp(-gamma dt) and sqrt(m kT (1 - e^{-2 gamma dt}))
    keep the Gibbs distribution stationary for any gamma.  omega may be an
    array of per-trajectory frequencies.
    """
    if np.any(np.asarray(omega) <= 0.0) or gamma <= 0.0 or temperature < 0.0:
        raise ValueError("need omega > 0, gamma > 0 and temperature >= 0")
    k = mass * np.asarray(omega, dtype=float) ** 2
    half_k = 0.5 * dt * k
    half_drift = 0.5 * dt / mass
    c1 = math.exp(-gamma * dt)
    c2 = math.sqrt(mass * K_BOLTZMANN * temperature * (1.0 - c1 * c1))
    for row in noise:
        px -= half_k * x
        x += half_drift * px
        px *= c1
        px += c2 * row
        x += half_drift * px
        px -= half_k * x
