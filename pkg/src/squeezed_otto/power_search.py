"""Brute-force maximization of cycle power over the hot-stroke frequency.

Independent numeric check of the closed-form maximum-power results: scans
work_net/tau over omega2 on a log-spaced ratio grid, then refines the best
bracket by golden-section search.  Uses only stroke_energies/work_and_heat,
never the closed forms it is meant to validate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .thermo import CycleParams, NonEngineError, stroke_energies, work_and_heat

RATIO_MAX_DEFAULT = 20.0
GRID_POINTS_DEFAULT = 200
RATIO_TOL = 1e-6


@dataclass(frozen=True)
class PowerSearchResult:
    """Argmax record of the power scan."""

    omega2: float
    ratio: float  # omega2 / omega1
    power: float
    efficiency: float
    n_grid_maxima: int  # local maxima seen on the coarse grid


def _power_at(ratio: float, beta1: float, beta2: float, r: float,
              omega1: float, tau: float) -> float:
    params = CycleParams(omega1=omega1, omega2=ratio * omega1, beta1=beta1,
                         beta2=beta2, r=r, tau=tau)
    return work_and_heat(stroke_energies(params), tau).power


def maximize_power_numeric(beta1: float, beta2: float, r: float, omega1: float,
                           tau: float, ratio_max: float = RATIO_MAX_DEFAULT,
                           grid_points: int = GRID_POINTS_DEFAULT) -> PowerSearchResult:
    """Locate the omega2 that maximizes extracted power at fixed omega1.

    Parameters
    ----------
    beta1, beta2 : float
        Inverse bath temperatures (1/J), beta1 > beta2.
    r : float
        Hot-bath squeezing parameter.
    omega1 : float
        Cold-stroke angular frequency (rad/s), kept fixed.
    tau : float
        Cycle time (s); scales power but not the argmax.
    ratio_max : float
        Upper end of the scanned omega2/omega1 range.
    grid_points : int
        Coarse log-spaced grid size before golden-section refinement.

    Raises
    ------
    NonEngineError
        If no scanned frequency yields positive extracted work.
    """
    if omega1 <= 0.0 or tau <= 0.0:
        raise ValueError("omega1 and tau must be positive")
    if ratio_max <= 1.0:
        raise ValueError("ratio_max must exceed 1")

    ratios = np.geomspace(1.0 + 1e-9, ratio_max, grid_points)
    powers = np.array([_power_at(q, beta1, beta2, r, omega1, tau) for q in ratios])
    if np.all(powers <= 0.0):
        raise NonEngineError("no positive-work window found in the scanned range")

    interior = (powers[1:-1] > powers[:-2]) & (powers[1:-1] >= powers[2:])
    maxima = [int(i) + 1 for i in np.flatnonzero(interior)]
    if powers[0] > powers[1]:
        maxima.insert(0, 0)
    if powers[-1] > powers[-2]:
        maxima.append(len(ratios) - 1)

    neg_power = lambda q: -_power_at(q, beta1, beta2, r, omega1, tau)
    best_ratio, best_power = None, -np.inf
    for i in maxima:
        if 0 < i < len(ratios) - 1:
            # golden-section refinement inside the bracketing grid triple
            res = optimize.minimize_scalar(
                neg_power, bracket=(ratios[i - 1], ratios[i], ratios[i + 1]),
                method="golden", options={"xtol": RATIO_TOL},
            )
            q_opt = float(res.x)
        else:
            # maximum pinned at a grid edge; refine against the edge
            lo = ratios[max(i - 1, 0)]
            hi = ratios[min(i + 1, len(ratios) - 1)]
            res = optimize.minimize_scalar(
                neg_power, bounds=(lo, hi), method="bounded",
                options={"xatol": RATIO_TOL * ratios[i]},
            )
            q_opt = float(res.x)
        p_opt = _power_at(q_opt, beta1, beta2, r, omega1, tau)
        if p_opt > best_power:
            best_ratio, best_power = q_opt, p_opt

    params = CycleParams(omega1=omega1, omega2=best_ratio * omega1, beta1=beta1,
                         beta2=beta2, r=r, tau=tau)
    out = work_and_heat(stroke_energies(params), tau)
    if not out.is_engine:
        raise NonEngineError("power maximum lies outside the engine regime")
    return PowerSearchResult(
        omega2=best_ratio * omega1,
        ratio=best_ratio,
        power=best_power,
        efficiency=out.efficiency,
        n_grid_maxima=len(maxima),
    )
