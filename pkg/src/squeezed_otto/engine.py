"""Ensemble Monte-Carlo sequencer for the tapered-trap Otto cycle.

A cycle is an ordered list of strokes:

    TransportStroke   conservative 2D motion through the taper; the axial
                      swing itself modulates omega_rad(z) (compression when
                      the ion moves toward the apex, expansion away from it)
    BathStroke        radial Langevin contact at a frozen axial position
    SqueezeStroke     three-segment parametric squeeze, axial position frozen
    RampStroke        direct omega modulation at a frozen axial position
                      (diagnostic mode used to probe adiabaticity factors)

The axial coordinate is frozen during bath/squeeze/ramp strokes: those
interactions are fast against the axial period and must keep omega_rad
constant (isochores).  Work is the radial-energy change during transport and
ramp strokes (extracted work positive); heat is the radial-energy change
during bath and squeeze strokes, the squeeze counting toward the hot-side
intake.  The axial mode is never damped; it stores the produced work.

Randomness: trajectory i draws from numpy Generator(PCG64) seeded with
SeedSequence(master_entropy, spawn_key=...).spawn(n)[i]; streams are
consumed strictly in stroke order, so runs are reproducible bit for bit for
a fixed seed, ensemble size and schedule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .constants import K_BOLTZMANN, beta_from_temperature
from .integrators import evolve_radial_const, evolve_radial_ramp, evolve_taper_2d
from .reservoirs import (
    BathConfig,
    EstimationError,
    CalibrationTable,
    estimate_squeezing,
    thermalize_radial,
)
from .thermo import carnot, curzon_ahlborn, efficiency_at_max_power, generalized_carnot, optimal_frequency_ratio
from .trap import (
    InfeasibleGeometryError,
    TrapGeometry,
    amplitude_for_ratio,
    axial_energy,
    radial_energy,
    radial_frequency,
)

DEFAULT_STEPS_PER_PERIOD = 200
FLAGGED_FRACTION_LIMIT = 0.05


# ---------------------------------------------------------------------------
# ensemble
# ---------------------------------------------------------------------------

@dataclass
class Ensemble:
    """Vectorized trajectory ensemble with per-trajectory rng streams."""

    z: np.ndarray
    pz: np.ndarray
    x: np.ndarray
    px: np.ndarray
    flags: np.ndarray  # True where a trajectory left the validity domain
    rngs: list

    @classmethod
    def at_rest(cls, n: int, seed: "int | np.random.SeedSequence",
                z0: float = 0.0) -> "Ensemble":
        """n trajectories at (z0, 0, 0, 0) with freshly spawned streams."""
        if n < 1:
            raise ValueError(f"ensemble size must be >= 1, got {n}")
        seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        rngs = [np.random.default_rng(child) for child in seq.spawn(n)]
        return cls(
            z=np.full(n, float(z0)), pz=np.zeros(n),
            x=np.zeros(n), px=np.zeros(n),
            flags=np.zeros(n, dtype=bool), rngs=rngs,
        )

    @property
    def size(self) -> int:
        return self.z.size

    @property
    def valid(self) -> np.ndarray:
        return ~self.flags

    def radial_energies(self, geom: TrapGeometry) -> np.ndarray:
        return radial_energy(geom, self.z, self.x, self.px)

    def axial_energies(self, geom: TrapGeometry) -> np.ndarray:
        return axial_energy(geom, self.z, self.pz)


# ---------------------------------------------------------------------------
# strokes and schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransportStroke:
    """Free 2D evolution through the taper for a fixed duration."""

    duration: float
    label: str


@dataclass(frozen=True)
class BathStroke:
    """Thermal contact at a frozen axial position."""

    bath: BathConfig
    label: str


@dataclass(frozen=True)
class SqueezeStroke:
    """Parametric squeeze at a frozen axial position."""

    delta_omega: float
    label: str = "squeeze"


@dataclass(frozen=True)
class RampStroke:
    """Direct radial-frequency ramp at a frozen axial position."""

    omega_start: float
    omega_end: float
    duration: float
    label: str = "ramp"


Stroke = TransportStroke | BathStroke | SqueezeStroke | RampStroke

# stroke labels contributing to the hot-side heat intake
_HOT_LABELS = ("hot_contact", "squeeze")
_WORK_KINDS = (TransportStroke, RampStroke)


@dataclass(frozen=True)
class CycleSchedule:
    """Ordered strokes of one closed cycle."""

    strokes: tuple

    def __post_init__(self) -> None:
        if not self.strokes:
            raise ValueError("schedule needs at least one stroke")
        labels = [s.label for s in self.strokes]
        if len(set(labels)) != len(labels):
            raise ValueError(f"stroke labels must be unique, got {labels}")
        n_transport = sum(isinstance(s, TransportStroke) for s in self.strokes)
        if n_transport % 2:
            raise ValueError("transports must come in pairs to close the cycle")

    @property
    def duration(self) -> float:
        return sum(_stroke_duration(s) for s in self.strokes)


def _stroke_duration(stroke: Stroke) -> float:
    if isinstance(stroke, TransportStroke):
        return stroke.duration
    if isinstance(stroke, BathStroke):
        return stroke.bath.duration
    if isinstance(stroke, RampStroke):
        return stroke.duration
    # squeeze duration depends on the anchor frequency; treated as ~half a
    # radial period, negligible against bath and transport strokes
    return 0.0


def build_engine_schedule(geom: TrapGeometry, *, t_cold: float, t_hot: float,
                          gamma: float, delta_omega: float,
                          gamma_t: float = 10.0) -> CycleSchedule:
    """Five-stroke Otto schedule: compress, heat, squeeze, expand, cool.

    Transport strokes last half an axial period, which carries the ion from
    one turning point to the other; bath contacts last gamma_t/gamma.
    """
    half_axial = math.pi / geom.omega_ax
    contact = gamma_t / gamma
    hot = BathConfig(kind="hot_thermal", temperature=t_hot, gamma=gamma, duration=contact)
    cold = BathConfig(kind="cold_thermal", temperature=t_cold, gamma=gamma, duration=contact)
    return CycleSchedule(strokes=(
        TransportStroke(duration=half_axial, label="compression"),
        BathStroke(bath=hot, label="hot_contact"),
        SqueezeStroke(delta_omega=delta_omega),
        TransportStroke(duration=half_axial, label="expansion"),
        BathStroke(bath=cold, label="cold_contact"),
    ))


# ---------------------------------------------------------------------------
# cycle records
# ---------------------------------------------------------------------------

class TemperatureEstimate(NamedTuple):
    kelvin: float
    std_error: float


@dataclass(frozen=True)
class CornerStat:
    """Ensemble snapshot between strokes."""

    label: str
    e_rad: float  # mean radial energy (J)
    e_rad_se: float
    e_ax: float  # mean axial energy (J)
    omega: float  # mean radial frequency (rad/s)
    z: float  # mean axial position (m)


@dataclass(frozen=True)
class TracePoint:
    t: float
    stroke: str
    z: float
    omega: float
    e_rad: float
    e_ax: float


@dataclass(frozen=True)
class CycleRecord:
    """Per-cycle ledger: corner statistics, stroke energy changes, work/heat."""

    corners: tuple  # CornerStat per stroke boundary, first entry = cycle start
    stroke_delta_e: dict  # label -> mean radial-energy change (J)
    work_net: float
    work_se: float
    heat_in: float
    heat_in_se: float
    heat_out: float
    power: float
    efficiency: float | None
    is_engine: bool
    temperature_start: TemperatureEstimate
    temperature_hot: TemperatureEstimate | None
    r_estimate: float | None
    flagged_fraction: float
    feasible: bool
    duration: float
    trace: tuple = field(default_factory=tuple)


def estimate_temperature(ensemble: Ensemble, geom: TrapGeometry) -> TemperatureEstimate:
    """Equipartition readout <E_rad>/k_B over unflagged trajectories."""
    e = ensemble.radial_energies(geom)[ensemble.valid]
    if e.size == 0:
        raise EstimationError("no valid trajectories left")
    t = float(np.mean(e)) / K_BOLTZMANN
    se = float(np.std(e, ddof=1)) / math.sqrt(e.size) / K_BOLTZMANN if e.size > 1 else 0.0
    return TemperatureEstimate(kelvin=t, std_error=se)


def _corner(ensemble: Ensemble, geom: TrapGeometry, label: str) -> CornerStat:
    ok = ensemble.valid
    e = ensemble.radial_energies(geom)[ok]
    se = float(np.std(e, ddof=1)) / math.sqrt(e.size) if e.size > 1 else 0.0
    return CornerStat(
        label=label,
        e_rad=float(np.mean(e)),
        e_rad_se=se,
        e_ax=float(np.mean(ensemble.axial_energies(geom)[ok])),
        omega=float(np.mean(np.asarray(radial_frequency(geom, ensemble.z))[ok])),
        z=float(np.mean(ensemble.z[ok])),
    )


# ---------------------------------------------------------------------------
# stroke execution
# ---------------------------------------------------------------------------

def integrate_stroke(ensemble: Ensemble, geom: TrapGeometry, stroke: Stroke,
                     dt_max: float) -> Ensemble:
    """Advance the ensemble through one stroke (in place; returns ensemble).

    Bath, squeeze and ramp strokes hold the axial coordinate frozen; the
    transport stroke runs the full 2D dynamics and flags trajectories with
    |z| > a_max.
    """
    if dt_max <= 0.0:
        raise ValueError(f"dt_max must be positive, got {dt_max}")
    m = geom.ion_mass
    if isinstance(stroke, TransportStroke):
        evolve_taper_2d(geom, ensemble.z, ensemble.pz, ensemble.x, ensemble.px,
                        stroke.duration, dt_max, flags=ensemble.flags)
    elif isinstance(stroke, BathStroke):
        w = np.asarray(radial_frequency(geom, ensemble.z), dtype=float)
        thermalize_radial(ensemble.x, ensemble.px, m, w, stroke.bath, dt_max,
                          ensemble.rngs)
    elif isinstance(stroke, SqueezeStroke):
        # per-trajectory stiffness, segment timing off the mean anchor frequency
        w = np.asarray(radial_frequency(geom, ensemble.z), dtype=float)
        w_nominal = float(np.mean(w[ensemble.valid]))
        for sign in (+1.0, -1.0):
            w_seg = w_nominal + sign * stroke.delta_omega
            if w_seg <= 0.0:
                raise ValueError("squeeze modulation must keep the frequency positive")
            quarter = 2.0 * math.pi / (4.0 * w_seg)
            evolve_radial_const(m, w + sign * stroke.delta_omega, ensemble.x,
                                ensemble.px, quarter, dt_max)
    elif isinstance(stroke, RampStroke):
        schedule = lambda s: stroke.omega_start + (stroke.omega_end - stroke.omega_start) * s
        evolve_radial_ramp(m, schedule, ensemble.x, ensemble.px, stroke.duration, dt_max)
    else:
        raise TypeError(f"unknown stroke type {type(stroke).__name__}")
    return ensemble


def _squeeze_duration(geom: TrapGeometry, ensemble: Ensemble, stroke: SqueezeStroke) -> float:
    w = np.asarray(radial_frequency(geom, ensemble.z), dtype=float)
    w_nominal = float(np.mean(w[ensemble.valid]))
    return (2.0 * math.pi / (4.0 * (w_nominal + stroke.delta_omega))
            + 2.0 * math.pi / (4.0 * (w_nominal - stroke.delta_omega)))


def equilibrate(ensemble: Ensemble, geom: TrapGeometry, bath: BathConfig,
                dt_max: float) -> Ensemble:
    """Bath contact used to prepare a fresh corner-A state."""
    return integrate_stroke(ensemble, geom, BathStroke(bath=bath, label="equilibrate"), dt_max)


# ---------------------------------------------------------------------------
# cycle driver
# ---------------------------------------------------------------------------

def run_cycle(ensemble: Ensemble, geom: TrapGeometry, schedule: CycleSchedule,
              dt_max: float, trace_points: int = 0) -> CycleRecord:
    """Execute one closed cycle and fill the work/heat ledger.

    trace_points > 0 additionally records that many ensemble-mean samples
    per stroke (time, position, frequency, energy shares) for cycle
    diagrams; tracing subdivides strokes and therefore slightly requantizes
    dt, so traced and untraced runs are not bit-identical to each other.
    """
    corners = [_corner(ensemble, geom, "start")]
    temperature_start = estimate_temperature(ensemble, geom)
    e_prev = ensemble.radial_energies(geom)
    t = 0.0
    trace: list[TracePoint] = []
    stroke_delta_e: dict[str, float] = {}
    work = np.zeros(ensemble.size)
    heat_hot = np.zeros(ensemble.size)
    heat_cold = np.zeros(ensemble.size)
    temperature_hot = None
    r_estimate = None

    if trace_points:
        trace.append(_trace_point(ensemble, geom, t, "start"))

    for stroke in schedule.strokes:
        duration = (_squeeze_duration(geom, ensemble, stroke)
                    if isinstance(stroke, SqueezeStroke) else _stroke_duration(stroke))
        if trace_points and isinstance(stroke, (TransportStroke, BathStroke)):
            for _ in range(trace_points):
                sub = _substroke(stroke, duration / trace_points)
                integrate_stroke(ensemble, geom, sub, dt_max)
                t += duration / trace_points
                trace.append(_trace_point(ensemble, geom, t, stroke.label))
        else:
            integrate_stroke(ensemble, geom, stroke, dt_max)
            t += duration
            if trace_points:
                trace.append(_trace_point(ensemble, geom, t, stroke.label))

        e_now = ensemble.radial_energies(geom)
        delta = e_now - e_prev
        e_prev = e_now
        ok = ensemble.valid
        stroke_delta_e[stroke.label] = float(np.mean(delta[ok]))
        if isinstance(stroke, _WORK_KINDS):
            work -= delta
        elif stroke.label in _HOT_LABELS or (
                isinstance(stroke, BathStroke) and stroke.bath.kind == "hot_thermal"):
            heat_hot += delta
        else:
            heat_cold += delta
        corners.append(_corner(ensemble, geom, stroke.label))

        if isinstance(stroke, BathStroke) and stroke.bath.kind == "hot_thermal":
            temperature_hot = estimate_temperature(ensemble, geom)
        if isinstance(stroke, SqueezeStroke):
            w_ref = float(np.mean(np.asarray(radial_frequency(geom, ensemble.z))[ok]))
            try:
                r_estimate = estimate_squeezing(ensemble.x[ok], ensemble.px[ok],
                                                w_ref, geom.ion_mass)
            except (EstimationError, ValueError):
                r_estimate = None

    ok = ensemble.valid
    nv = int(np.count_nonzero(ok))
    if nv < 2:
        raise EstimationError("fewer than two valid trajectories after the cycle")
    work_net = float(np.mean(work[ok]))
    work_se = float(np.std(work[ok], ddof=1)) / math.sqrt(nv)
    heat_in = float(np.mean(heat_hot[ok]))
    heat_in_se = float(np.std(heat_hot[ok], ddof=1)) / math.sqrt(nv)
    heat_out = -float(np.mean(heat_cold[ok]))
    is_engine = heat_in > 0.0 and work_net > 0.0
    flagged = 1.0 - nv / ensemble.size

    return CycleRecord(
        corners=tuple(corners),
        stroke_delta_e=stroke_delta_e,
        work_net=work_net,
        work_se=work_se,
        heat_in=heat_in,
        heat_in_se=heat_in_se,
        heat_out=heat_out,
        power=work_net / schedule.duration if schedule.duration > 0 else 0.0,
        efficiency=work_net / heat_in if is_engine else None,
        is_engine=is_engine,
        temperature_start=temperature_start,
        temperature_hot=temperature_hot,
        r_estimate=r_estimate,
        flagged_fraction=flagged,
        feasible=flagged <= FLAGGED_FRACTION_LIMIT,
        duration=schedule.duration,
        trace=tuple(trace),
    )


def _substroke(stroke: Stroke, duration: float) -> Stroke:
    if isinstance(stroke, TransportStroke):
        return TransportStroke(duration=duration, label=stroke.label)
    bath = stroke.bath
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # subdividing a long contact is fine
        sub = BathConfig(kind=bath.kind, temperature=bath.temperature,
                         gamma=bath.gamma, duration=duration)
    return BathStroke(bath=sub, label=stroke.label)


def _trace_point(ensemble: Ensemble, geom: TrapGeometry, t: float, label: str) -> TracePoint:
    ok = ensemble.valid
    return TracePoint(
        t=t,
        stroke=label,
        z=float(np.mean(ensemble.z[ok])),
        omega=float(np.mean(np.asarray(radial_frequency(geom, ensemble.z))[ok])),
        e_rad=float(np.mean(ensemble.radial_energies(geom)[ok])),
        e_ax=float(np.mean(ensemble.axial_energies(geom)[ok])),
    )


# ---------------------------------------------------------------------------
# parameter sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    """One squeezing target of the efficiency sweep."""

    r_target: float
    feasible: bool
    delta_omega: float | None = None
    ratio: float | None = None
    omega1: float | None = None
    omega2: float | None = None
    amplitude: float | None = None
    eta_sim: float | None = None
    eta_err: float | None = None
    r_measured: float | None = None
    eta_max_power: float | None = None
    eta_curzon_ahlborn: float | None = None
    eta_carnot: float | None = None
    eta_gen_carnot: float | None = None
    n_cycles: int = 0
    flagged_fraction: float = 0.0
    note: str = ""


def run_sweep(geom: TrapGeometry, *, t_cold: float, t_hot: float, gamma: float,
              r_targets, calibration: CalibrationTable, n_trajectories: int = 1000,
              repetitions: int = 20, seed: int = 0,
              steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
              gamma_t: float = 10.0) -> list[SweepRow]:
    """Simulated efficiency versus squeezing at the optimal frequency ratio.

    For each target r: the frequency ratio follows the closed-form
    maximum-power condition, the axial amplitude realizes that ratio through
    the taper, the modulation depth comes from the calibration table, and
    `repetitions` cycles are run on an ensemble prepared by a cold contact.
    Efficiency is reported as mean +/- standard error over repetitions.
    """
    if t_hot <= t_cold:
        raise ValueError(f"need t_hot > t_cold, got {t_hot} <= {t_cold}")
    beta1 = beta_from_temperature(t_cold)
    beta2 = beta_from_temperature(t_hot)
    rows: list[SweepRow] = []
    for index, r_target in enumerate(r_targets):
        ratio = optimal_frequency_ratio(beta1, beta2, r_target)
        try:
            amplitude = amplitude_for_ratio(geom, ratio)
            frac = calibration.delta_fraction_for(r_target)
        except (InfeasibleGeometryError, ValueError) as err:
            rows.append(SweepRow(r_target=float(r_target), feasible=False, note=str(err)))
            continue
        z_cold, z_hot = +amplitude, -amplitude
        omega1 = radial_frequency(geom, z_cold)
        omega2 = radial_frequency(geom, z_hot)
        delta_omega = frac * omega2
        dt_max = 2.0 * math.pi / ((omega2 + abs(delta_omega)) * steps_per_period)
        schedule = build_engine_schedule(geom, t_cold=t_cold, t_hot=t_hot,
                                         gamma=gamma, delta_omega=delta_omega,
                                         gamma_t=gamma_t)
        point_seq = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
        ens = Ensemble.at_rest(n_trajectories, point_seq, z0=z_cold)
        cold = BathConfig(kind="cold_thermal", temperature=t_cold, gamma=gamma,
                          duration=gamma_t / gamma)
        equilibrate(ens, geom, cold, dt_max)

        works, heats, r_ests = [], [], []
        n_engine = 0
        for _ in range(repetitions):
            rec = run_cycle(ens, geom, schedule, dt_max)
            works.append(rec.work_net)
            heats.append(rec.heat_in)
            n_engine += rec.is_engine
            if rec.r_estimate is not None:
                r_ests.append(rec.r_estimate)
        # pooled-ratio estimator: near the engine threshold the per-cycle
        # heat intake is only a few sigma positive, so mean-of-ratios blows
        # up while sum(W)/sum(Q) stays well conditioned (W tracks Q_in
        # trajectory by trajectory in the adiabatic limit)
        eta_sim, eta_err = _pooled_efficiency(works, heats)
        rows.append(SweepRow(
            r_target=float(r_target),
            feasible=ens.flags.mean() <= FLAGGED_FRACTION_LIMIT,
            delta_omega=delta_omega,
            ratio=float(ratio),
            omega1=omega1,
            omega2=omega2,
            amplitude=amplitude,
            eta_sim=eta_sim,
            eta_err=eta_err,
            r_measured=float(np.mean(r_ests)) if r_ests else None,
            eta_max_power=efficiency_at_max_power(beta1, beta2, r_target),
            eta_curzon_ahlborn=curzon_ahlborn(beta1, beta2),
            eta_carnot=carnot(beta1, beta2),
            eta_gen_carnot=generalized_carnot(beta1, beta2, r_target),
            n_cycles=n_engine,
            flagged_fraction=float(ens.flags.mean()),
            note="" if eta_sim is not None else "pooled cycle not in the engine regime",
        ))
    return rows


def _pooled_efficiency(works: list, heats: list) -> tuple:
    """sum(W)/sum(Q_in) over repetitions with a delete-one jackknife error.

    Returns (None, None) unless the pooled work and heat intake are both
    positive.
    """
    w = np.asarray(works, dtype=float)
    q = np.asarray(heats, dtype=float)
    if w.size == 0 or w.sum() <= 0.0 or q.sum() <= 0.0:
        return None, None
    eta = float(w.sum() / q.sum())
    n = w.size
    if n < 2:
        return eta, None
    loo = (w.sum() - w) / (q.sum() - q)  # leave-one-out ratios
    if not np.all(np.isfinite(loo)):
        return eta, None
    eta_err = float(math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))
    return eta, eta_err
