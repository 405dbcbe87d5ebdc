"""Physical constants and unit helpers.

All quantities in this package are SI unless a name says otherwise.
Temperatures cross the public interface in kelvin; inverse temperatures
beta = 1/(k_B T) appear only inside formulas.
"""

from __future__ import annotations

# 2019 SI exact values
HBAR = 1.054571817e-34  # J s
K_BOLTZMANN = 1.380649e-23  # J / K
ATOMIC_MASS = 1.66053906892e-27  # kg

# mass of a calcium-40 ion, the default working ion
CA40_MASS = 39.9625909 * ATOMIC_MASS  # kg


def beta_from_temperature(temperature: float) -> float:
    """Inverse temperature 1/(k_B T) in 1/J for T in K (T > 0)."""
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return 1.0 / (K_BOLTZMANN * temperature)


def temperature_from_beta(beta: float) -> float:
    """Temperature in K for inverse temperature beta in 1/J (beta > 0)."""
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    return 1.0 / (K_BOLTZMANN * beta)
