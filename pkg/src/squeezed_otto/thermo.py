"""Closed-form thermodynamics of a harmonic Otto cycle with a squeezed hot bath.

The working fluid is a single harmonic mode whose frequency alternates
between omega1 (cold contact) and omega2 > omega1 (hot contact).  The hot
reservoir is a squeezed thermal bath with squeezing parameter r.  Cycle
corners:

    A  thermal state at (omega1, beta1)
    B  after compression omega1 -> omega2, adiabaticity factor Q*_1
    C  after relaxation to the squeezed hot bath at (omega2, beta2, r)
    D  after expansion omega2 -> omega1, adiabaticity factor Q*_2

Mean corner energies::

    E_A = (hbar w1 / 2) coth(b1 hbar w1 / 2)
    E_B = (hbar w2 / 2) Q*_1 coth(b1 hbar w1 / 2)
    E_C = (hbar w2 / 2) coth(b2 hbar w2 / 2) dH(r)
    E_D = (hbar w1 / 2) Q*_2 coth(b2 hbar w2 / 2) dH(r)

with the squeeze enhancement dH(r) = 1 + (2 + 1/<n>) sinh^2 r and
<n> = 1/(exp(b2 hbar w2) - 1).

Sign convention: work extracted by the engine is positive; heat absorbed
by the working fluid is positive.  Efficiency is work_net/heat_in and is
only defined while the cycle operates as an engine (heat_in > 0 and
work_net > 0); other regimes carry an explicit non-engine status.

All functions accept floats and numpy arrays where dimensionally sensible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import HBAR

# series branch threshold for coth; below this 1/tanh(x) loses digits
_COTH_SMALL = 1e-4


class NonEngineError(RuntimeError):
    """Raised when efficiency is requested outside the engine regime."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CycleParams:
    """Parameters of one analytic Otto cycle.

    Attributes
    ----------
    omega1, omega2 : float
        Angular frequencies of the cold and hot strokes (rad/s), omega2 > omega1.
    beta1, beta2 : float
        Inverse temperatures of the cold and hot baths (1/J), beta1 > beta2.
    r : float
        Squeezing parameter of the hot bath, r >= 0.
    q_star_1, q_star_2 : float
        Adiabaticity factors of compression and expansion, >= 1 (1 = adiabatic).
    tau : float
        Cycle duration in s used for power; an independent constant here.
    """

    omega1: float
    omega2: float
    beta1: float
    beta2: float
    r: float = 0.0
    q_star_1: float = 1.0
    q_star_2: float = 1.0
    tau: float = 1.0

    def __post_init__(self) -> None:
        if not (self.omega2 > self.omega1 > 0.0):
            raise ValueError(
                f"need omega2 > omega1 > 0, got omega1={self.omega1}, omega2={self.omega2}"
            )
        if not (self.beta1 > self.beta2 > 0.0):
            raise ValueError(
                f"need beta1 > beta2 > 0 (cold colder than hot), got "
                f"beta1={self.beta1}, beta2={self.beta2}"
            )
        if self.q_star_1 < 1.0 or self.q_star_2 < 1.0:
            raise ValueError(
                f"adiabaticity factors must be >= 1, got {self.q_star_1}, {self.q_star_2}"
            )
        if self.r < 0.0:
            raise ValueError(f"squeezing parameter must be >= 0, got {self.r}")
        if self.tau <= 0.0:
            raise ValueError(f"cycle time must be positive, got {self.tau}")


@dataclass(frozen=True)
class StrokeEnergies:
    """Mean energies (J) at the four cycle corners."""

    e_a: float
    e_b: float
    e_c: float
    e_d: float


@dataclass(frozen=True)
class CycleOutputs:
    """Work, heat and efficiency record of one cycle.

    work_net > 0 means extracted work; heat_in is the energy absorbed from
    the hot squeezed bath, heat_out the energy dumped to the cold bath.
    efficiency is None outside the engine regime (is_engine False).
    """

    work_net: float
    heat_in: float
    heat_out: float
    power: float
    efficiency: float | None
    is_engine: bool


# ---------------------------------------------------------------------------
# elementary state functions
# ---------------------------------------------------------------------------

def coth(x):
    """Hyperbolic cotangent, numerically safe on (0, inf).

    Uses the Laurent series 1/x + x/3 - x^3/45 below x = 1e-4 where
    1/tanh(x) would waste significant digits.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("coth argument must be positive")
    small = x < _COTH_SMALL
    xs = np.where(small, 1.0, x)  # keep tanh away from the tiny branch
    out = np.where(small, 1.0 / np.where(small, x, 1.0) + x / 3.0 - x**3 / 45.0,
                   1.0 / np.tanh(xs))
    return float(out) if out.ndim == 0 else out


def thermal_mean_energy(omega, beta):
    """Mean energy (J) of a harmonic mode at inverse temperature beta (1/J).

    Equals (hbar*omega/2) coth(beta*hbar*omega/2); decreasing in beta with
    zero-point floor hbar*omega/2.
    """
    omega = np.asarray(omega, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(omega <= 0.0) or np.any(beta <= 0.0):
        raise ValueError("omega and beta must be positive")
    out = 0.5 * HBAR * omega * coth(0.5 * beta * HBAR * omega)
    return float(out) if np.ndim(out) == 0 else out


def thermal_occupation(omega, beta):
    """Thermal occupation number 1/(exp(beta*hbar*omega) - 1)."""
    omega = np.asarray(omega, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(omega <= 0.0) or np.any(beta <= 0.0):
        raise ValueError("omega and beta must be positive")
    out = 1.0 / np.expm1(beta * HBAR * omega)
    return float(out) if np.ndim(out) == 0 else out


def squeezed_occupation(n_thermal, r):
    """Occupation <n> + (2<n>+1) sinh^2 r of a squeezed thermal state."""
    n_thermal = np.asarray(n_thermal, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(n_thermal < 0.0) or np.any(r < 0.0):
        raise ValueError("occupation and squeezing parameter must be >= 0")
    out = n_thermal + (2.0 * n_thermal + 1.0) * np.sinh(r) ** 2
    return float(out) if np.ndim(out) == 0 else out


def squeeze_enhancement(n_thermal, r):
    """Energy enhancement factor dH(r) = 1 + (2 + 1/<n>) sinh^2 r.

    Multiplies the hot-contact corner energies; equals 1 at r = 0 and tends
    to cosh 2r as <n> -> inf.  Singular at <n> = 0, which is a domain error
    here (the hot bath always has finite temperature).
    """
    n_thermal = np.asarray(n_thermal, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(n_thermal <= 0.0):
        raise ValueError("squeeze_enhancement requires n_thermal > 0")
    if np.any(r < 0.0):
        raise ValueError("squeezing parameter must be >= 0")
    out = 1.0 + (2.0 + 1.0 / n_thermal) * np.sinh(r) ** 2
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# cycle energetics
# ---------------------------------------------------------------------------

def stroke_energies(params: CycleParams) -> StrokeEnergies:
    """Mean corner energies of the cycle described by params."""
    w1, w2 = params.omega1, params.omega2
    c1 = coth(0.5 * params.beta1 * HBAR * w1)
    c2 = coth(0.5 * params.beta2 * HBAR * w2)
    dh = squeeze_enhancement(thermal_occupation(w2, params.beta2), params.r)
    e_a = 0.5 * HBAR * w1 * c1
    e_b = 0.5 * HBAR * w2 * params.q_star_1 * c1
    e_c = 0.5 * HBAR * w2 * c2 * dh
    e_d = 0.5 * HBAR * w1 * params.q_star_2 * c2 * dh
    return StrokeEnergies(e_a=e_a, e_b=e_b, e_c=e_c, e_d=e_d)


def work_and_heat(energies: StrokeEnergies, tau: float) -> CycleOutputs:
    """Work and heat ledger of one cycle from its corner energies.

    heat_in = E_C - E_B (hot contact), heat_out = E_D - E_A (cold contact),
    work_net = heat_in - heat_out.  Flags the record non-engine when
    heat_in <= 0 or work_net <= 0; efficiency is None there.
    """
    if tau <= 0.0:
        raise ValueError(f"cycle time must be positive, got {tau}")
    heat_in = energies.e_c - energies.e_b
    heat_out = energies.e_d - energies.e_a
    work_net = heat_in - heat_out
    is_engine = heat_in > 0.0 and work_net > 0.0
    eta = work_net / heat_in if is_engine else None
    return CycleOutputs(
        work_net=work_net,
        heat_in=heat_in,
        heat_out=heat_out,
        power=work_net / tau,
        efficiency=eta,
        is_engine=is_engine,
    )


def efficiency(params: CycleParams) -> float:
    """Exact cycle efficiency, valid for any temperature, squeezing and Q*.

    eta = 1 - (w1/w2) [coth(b1 hw1/2) - Q*_2 coth(b2 hw2/2) dH(r)]
                    / [Q*_1 coth(b1 hw1/2) - coth(b2 hw2/2) dH(r)]

    Raises NonEngineError outside the engine regime (use work_and_heat for
    a non-raising status record).
    """
    out = work_and_heat(stroke_energies(params), params.tau)
    if not out.is_engine:
        raise NonEngineError(
            "cycle does not operate as an engine for these parameters "
            f"(heat_in={out.heat_in:.3e} J, work_net={out.work_net:.3e} J)"
        )
    c1 = coth(0.5 * params.beta1 * HBAR * params.omega1)
    c2 = coth(0.5 * params.beta2 * HBAR * params.omega2)
    dh = squeeze_enhancement(thermal_occupation(params.omega2, params.beta2), params.r)
    bracket = (c1 - params.q_star_2 * c2 * dh) / (params.q_star_1 * c1 - c2 * dh)
    return 1.0 - (params.omega1 / params.omega2) * bracket


# ---------------------------------------------------------------------------
# maximum-power characteristics (high-temperature closed forms)
# ---------------------------------------------------------------------------

def _check_betas(beta1, beta2, strict: bool = True) -> None:
    beta1 = np.asarray(beta1, dtype=float)
    beta2 = np.asarray(beta2, dtype=float)
    if np.any(beta2 <= 0.0):
        raise ValueError("inverse temperatures must be positive")
    if strict and np.any(beta1 <= beta2):
        raise ValueError("need beta1 > beta2 (cold bath colder than hot bath)")
    if not strict and np.any(beta1 < beta2):
        raise ValueError("need beta1 >= beta2")


def optimal_frequency_ratio(beta1, beta2, r):
    """Power-maximizing frequency ratio omega2/omega1 in the high-T limit.

    Equals sqrt(beta1 (1 + 2 sinh^2 r) / beta2) = sqrt(beta1 cosh(2r) / beta2).
    """
    _check_betas(beta1, beta2)
    if np.any(np.asarray(r, dtype=float) < 0.0):
        raise ValueError("squeezing parameter must be >= 0")
    out = np.sqrt(np.asarray(beta1, dtype=float) * np.cosh(2.0 * np.asarray(r, dtype=float))
                  / np.asarray(beta2, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def efficiency_at_max_power(beta1, beta2, r):
    """Efficiency at maximum power, 1 - sqrt(beta2 / (beta1 cosh 2r)).

    Reduces to the Curzon-Ahlborn value at r = 0, increases strictly with r
    and tends to 1 as r -> inf.
    """
    _check_betas(beta1, beta2)
    if np.any(np.asarray(r, dtype=float) < 0.0):
        raise ValueError("squeezing parameter must be >= 0")
    out = 1.0 - np.sqrt(np.asarray(beta2, dtype=float)
                        / (np.asarray(beta1, dtype=float) * np.cosh(2.0 * np.asarray(r, dtype=float))))
    return float(out) if np.ndim(out) == 0 else out


def efficiency_asymptotic(beta1, beta2, r):
    """Large-r asymptote 1 - sqrt(2 (beta2/beta1) e^{-2r}) of the maximum-power efficiency.

    Valid only for large r (the relative deviation from the exact form is the
    e^{-4r} correction of cosh 2r); not meaningful near r = 0.
    """
    _check_betas(beta1, beta2)
    if np.any(np.asarray(r, dtype=float) <= 0.0):
        raise ValueError("asymptote requires r > 0")
    out = 1.0 - np.sqrt(2.0 * np.asarray(beta2, dtype=float) / np.asarray(beta1, dtype=float)
                        * np.exp(-2.0 * np.asarray(r, dtype=float)))
    return float(out) if np.ndim(out) == 0 else out


def generalized_carnot(beta1, beta2, r):
    """Upper efficiency bound 1 - beta2 / (beta1 (1 + 2 sinh^2 r)).

    Reduces to the standard Carnot efficiency at r = 0; the squeezed-bath
    engine may exceed the standard Carnot value but never this bound.
    """
    _check_betas(beta1, beta2)
    if np.any(np.asarray(r, dtype=float) < 0.0):
        raise ValueError("squeezing parameter must be >= 0")
    out = 1.0 - np.asarray(beta2, dtype=float) / (np.asarray(beta1, dtype=float)
                                                  * np.cosh(2.0 * np.asarray(r, dtype=float)))
    return float(out) if np.ndim(out) == 0 else out


def carnot(beta1, beta2):
    """Standard Carnot efficiency 1 - beta2/beta1."""
    _check_betas(beta1, beta2, strict=False)
    out = 1.0 - np.asarray(beta2, dtype=float) / np.asarray(beta1, dtype=float)
    return float(out) if np.ndim(out) == 0 else out


def curzon_ahlborn(beta1, beta2):
    """Curzon-Ahlborn efficiency 1 - sqrt(beta2/beta1)."""
    _check_betas(beta1, beta2, strict=False)
    out = 1.0 - np.sqrt(np.asarray(beta2, dtype=float) / np.asarray(beta1, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def carnot_crossing_squeeze(beta1, beta2):
    """Squeezing parameter where the max-power efficiency meets standard Carnot.

    Solves efficiency_at_max_power = 1 - beta2/beta1, giving
    sinh^2 r = (beta1/beta2 - 1)/2.
    """
    _check_betas(beta1, beta2)
    out = np.arcsinh(np.sqrt(0.5 * (np.asarray(beta1, dtype=float)
                                    / np.asarray(beta2, dtype=float) - 1.0)))
    return float(out) if np.ndim(out) == 0 else out
