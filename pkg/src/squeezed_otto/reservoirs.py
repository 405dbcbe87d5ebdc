"""Stochastic reservoirs acting on the radial mode, and the squeeze protocol.

Thermal contact models the velocity-dependent laser scattering force as
underdamped Langevin friction + Gaussian recoil satisfying fluctuation-
dissipation at the bath temperature; the momentum refresh is an exact
Ornstein-Uhlenbeck update, so the Gibbs state is stationary at any gamma.
Baths couple to the radial mode only; the axial mode stores the produced
work and is never damped.

The squeeze operation is a three-segment parametric protocol at a frozen
axial position: a quarter period at omega + delta_omega, a quarter period at
omega - delta_omega, then an instantaneous return to omega.  For an ideal
harmonic mode this maps (x, px) -> (-s x, -px/s) with s = (omega+delta)/
(omega-delta), i.e. a nondisplaced squeeze with r = ln s; the calibration
routine measures the realized r from ensemble covariances.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import K_BOLTZMANN
from .integrators import evolve_radial_const, langevin_radial, split_steps
from .trap import PhasePoint, TrapGeometry, radial_frequency

# chunked noise generation bound (steps per block), keeps memory flat
_NOISE_CHUNK = 2048

THERMAL_KINDS = ("cold_thermal", "hot_thermal")


class EstimationError(RuntimeError):
    """Ensemble statistics too degenerate for the requested estimate."""


class CalibrationRangeError(ValueError):
    """Target squeezing outside the calibrated range."""


@dataclass(frozen=True)
class BathConfig:
    """One reservoir interaction of the cycle.

    kind 'cold_thermal'/'hot_thermal' use temperature (K), gamma (1/s) and
    duration (s); kind 'squeeze' uses delta_omega (rad/s).  All act on the
    radial axis.
    """

    kind: str
    temperature: float | None = None
    gamma: float | None = None
    duration: float | None = None
    delta_omega: float | None = None
    axis: str = "radial"

    def __post_init__(self) -> None:
        if self.axis != "radial":
            raise ValueError(f"only the radial axis couples to reservoirs, got {self.axis}")
        if self.kind in THERMAL_KINDS:
            if self.temperature is None or self.temperature <= 0.0:
                raise ValueError(f"thermal bath needs temperature > 0, got {self.temperature}")
            if self.gamma is None or self.gamma <= 0.0:
                raise ValueError(f"thermal bath needs gamma > 0, got {self.gamma}")
            if self.duration is None or self.duration <= 0.0:
                raise ValueError(f"thermal bath needs duration > 0, got {self.duration}")
            if self.gamma * self.duration < 10.0:
                warnings.warn(
                    f"thermal contact gamma*duration = {self.gamma * self.duration:.2f} < 10; "
                    "relaxation may be incomplete", stacklevel=2,
                )
        elif self.kind == "squeeze":
            if self.delta_omega is None:
                raise ValueError("squeeze bath needs delta_omega")
        else:
            raise ValueError(f"unknown bath kind {self.kind!r}")


# ---------------------------------------------------------------------------
# thermal contact
# ---------------------------------------------------------------------------

def ou_momentum_update(px, mass: float, gamma: float, temperature: float,
                       dt: float, xi):
    """Exact OU momentum refresh: e^{-g dt} px + sqrt(m kT (1-e^{-2 g dt})) xi."""
    c1 = math.exp(-gamma * dt)
    c2 = math.sqrt(mass * K_BOLTZMANN * temperature * (1.0 - c1 * c1))
    return c1 * px + c2 * xi


def thermal_contact_step(p: PhasePoint, bath: BathConfig, mass: float,
                         dt: float, rng: np.random.Generator) -> PhasePoint:
    """One bath step on a single phase point: radial momentum refresh only.

    Conservative forces are the integrator's job; this composes with it by
    splitting.  dt must satisfy dt <= 0.01/gamma; the caller also keeps dt
    at or below a hundredth of the radial period.
    """
    if bath.kind not in THERMAL_KINDS:
        raise ValueError(f"thermal contact requires a thermal bath, got kind {bath.kind!r}")
    if dt <= 0.0 or dt > 0.01 / bath.gamma:
        raise ValueError(f"dt must lie in (0, 0.01/gamma], got {dt}")
    px = ou_momentum_update(p.px, mass, bath.gamma, bath.temperature, dt,
                            float(rng.standard_normal()))
    return PhasePoint(z=p.z, pz=p.pz, x=p.x, px=float(px))


def draw_noise_block(rngs, n_steps: int) -> np.ndarray:
    """Stack per-trajectory standard normals into an (n_steps, n_traj) block.

    Column i consumes trajectory i's private stream sequentially, so results
    do not depend on the chunking of a stroke.
    """
    out = np.empty((n_steps, len(rngs)))
    for i, rng in enumerate(rngs):
        out[:, i] = rng.standard_normal(n_steps)
    return out


def thermalize_radial(x, px, mass: float, omega: float, bath: BathConfig,
                      dt_max: float, rngs) -> None:
    """Evolve the radial mode in contact with a thermal bath (in place).

    BAOAB splitting at fixed frequency omega for bath.duration, noise drawn
    from the per-trajectory streams in rngs.
    """
    if bath.kind not in THERMAL_KINDS:
        raise ValueError(f"expected a thermal bath, got kind {bath.kind!r}")
    dt_bath = 0.01 / bath.gamma
    n, dt = split_steps(bath.duration, min(dt_max, dt_bath))
    done = 0
    while done < n:
        k = min(_NOISE_CHUNK, n - done)
        noise = draw_noise_block(rngs, k)
        langevin_radial(mass, omega, bath.gamma, bath.temperature, x, px, dt, noise)
        done += k


# ---------------------------------------------------------------------------
# parametric squeeze protocol
# ---------------------------------------------------------------------------

def squeeze_protocol(geom: TrapGeometry, z_anchor: float, delta_omega: float,
                     x, px, dt_max: float) -> None:
    """Apply the three-segment parametric squeeze at a frozen axial position.

    Segment 1: quarter period at omega + delta_omega (duration
    2 pi / (4 (omega + delta_omega))); segment 2: quarter period at
    omega - delta_omega; then the frequency returns to omega instantly.
    Mutates (x, px) in place.
    """
    omega = radial_frequency(geom, z_anchor)
    w_up = omega + delta_omega
    w_down = omega - delta_omega
    if w_up <= 0.0 or w_down <= 0.0:
        raise ValueError(
            f"|delta_omega| must stay below the anchor frequency {omega:.4e}, "
            f"got {delta_omega:.4e}"
        )
    if delta_omega == 0.0 and np.ndim(x) == 0:
        return
    for w in (w_up, w_down):
        quarter = 2.0 * math.pi / (4.0 * w)
        evolve_radial_const(geom.ion_mass, w, x, px, quarter, dt_max)


# ---------------------------------------------------------------------------
# squeezing estimation and calibration
# ---------------------------------------------------------------------------

def estimate_squeezing(x, px, omega_ref: float, mass: float) -> float:
    """Squeezing parameter from ensemble quadrature covariances.

    Builds u = x sqrt(m omega_ref), v = px / sqrt(m omega_ref) (any common
    scale cancels), eigendecomposes their 2x2 covariance and returns
    r = (1/4) ln(lambda_max/lambda_min).  Rotation of the ensemble in the
    (u, v) plane leaves the estimate unchanged.
    """
    x = np.asarray(x, dtype=float)
    px = np.asarray(px, dtype=float)
    if x.size < 100:
        raise ValueError(f"need at least 100 trajectories to estimate r, got {x.size}")
    if omega_ref <= 0.0 or mass <= 0.0:
        raise ValueError("omega_ref and mass must be positive")
    scale = math.sqrt(mass * omega_ref)
    cov = np.cov(np.vstack([x * scale, px / scale]))
    lam = np.linalg.eigvalsh(cov)
    if not np.all(np.isfinite(lam)) or lam[0] <= 0.0:
        raise EstimationError("degenerate quadrature covariance")
    return 0.25 * math.log(lam[1] / lam[0])


@dataclass(frozen=True)
class CalibrationRow:
    """Measured response of the squeeze protocol at one modulation depth."""

    delta_omega_fraction: float  # delta_omega / anchor frequency
    delta_omega: float  # rad/s at the calibration anchor
    r_est: float
    e_before: float  # mean radial energy (J)
    e_after: float
    pe_before: float  # mean radial potential energy (J)
    pe_after: float


@dataclass(frozen=True)
class CalibrationTable:
    """Monotone map between modulation depth and realized squeezing."""

    anchor_omega: float
    rows: tuple[CalibrationRow, ...]

    def delta_fraction_for(self, r_target: float) -> float:
        """Modulation fraction achieving r_target, by interpolation.

        Targets at or below the table's noise floor return the zero
        modulation row; targets above the calibrated range raise.
        """
        if r_target < 0.0:
            raise ValueError(f"target squeezing must be >= 0, got {r_target}")
        r = np.array([row.r_est for row in self.rows])
        f = np.array([row.delta_omega_fraction for row in self.rows])
        order = np.argsort(r)
        r, f = r[order], f[order]
        if r_target <= r[0]:
            return float(f[0])
        if r_target > r[-1]:
            raise CalibrationRangeError(
                f"target r = {r_target:.3f} beyond calibrated maximum {r[-1]:.3f}"
            )
        return float(np.interp(r_target, r, f))


def calibrate_squeeze(geom: TrapGeometry, temperature: float, gamma: float,
                      delta_omega_fractions, *, z_anchor: float = 0.0,
                      n_trajectories: int = 2000, seed: int = 0,
                      steps_per_period: int = 200,
                      gamma_t: float = 10.0) -> CalibrationTable:
    """Measure realized squeezing versus modulation depth.

    For each fraction in delta_omega_fractions: thermalize the radial mode
    at the anchor position, run the squeeze protocol with
    delta_omega = fraction * omega_anchor, and record the estimated r plus
    mean radial and potential energies before/after.  Fractions are
    dimensionless, so the table transfers to any anchor frequency.
    """
    omega = radial_frequency(geom, z_anchor)
    dt_max = 2.0 * math.pi / (omega * steps_per_period)
    master = np.random.SeedSequence(seed)
    rows = []
    for i, frac in enumerate(delta_omega_fractions):
        if not -1.0 < frac < 1.0:
            raise ValueError(f"modulation fraction must lie in (-1, 1), got {frac}")
        # fresh ensemble and streams per grid point: points are independent
        point_seq = np.random.SeedSequence(entropy=master.entropy, spawn_key=(i,))
        rngs = [np.random.default_rng(s) for s in point_seq.spawn(n_trajectories)]
        x = np.zeros(n_trajectories)
        px = np.zeros(n_trajectories)
        bath = BathConfig(kind="hot_thermal", temperature=temperature, gamma=gamma,
                          duration=gamma_t / gamma)
        thermalize_radial(x, px, geom.ion_mass, omega, bath, dt_max, rngs)
        e_before = float(np.mean(px**2 / (2.0 * geom.ion_mass)
                                 + 0.5 * geom.ion_mass * omega**2 * x**2))
        pe_before = float(np.mean(0.5 * geom.ion_mass * omega**2 * x**2))
        squeeze_protocol(geom, z_anchor, frac * omega, x, px, dt_max)
        e_after = float(np.mean(px**2 / (2.0 * geom.ion_mass)
                                + 0.5 * geom.ion_mass * omega**2 * x**2))
        pe_after = float(np.mean(0.5 * geom.ion_mass * omega**2 * x**2))
        rows.append(CalibrationRow(
            delta_omega_fraction=float(frac),
            delta_omega=float(frac * omega),
            r_est=estimate_squeezing(x, px, omega, geom.ion_mass),
            e_before=e_before, e_after=e_after,
            pe_before=pe_before, pe_after=pe_after,
        ))
    return CalibrationTable(anchor_omega=omega, rows=tuple(rows))
