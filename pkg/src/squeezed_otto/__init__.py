"""Single-ion Otto heat engine with a squeezed hot reservoir.

Analytic thermodynamics of the four-corner cycle, a tapered Paul-trap model
whose axial motion modulates the radial frequency, stochastic reservoir
strokes (Langevin contact, parametric squeeze), and an ensemble Monte-Carlo
cycle driver with a work/heat ledger.  The `squeezed-otto` console script
exposes the report path.
"""

__version__ = "0.1.0"

from .constants import beta_from_temperature, temperature_from_beta
from .thermo import (
    CycleOutputs,
    CycleParams,
    NonEngineError,
    StrokeEnergies,
    carnot,
    carnot_crossing_squeeze,
    curzon_ahlborn,
    efficiency,
    efficiency_asymptotic,
    efficiency_at_max_power,
    generalized_carnot,
    optimal_frequency_ratio,
    squeeze_enhancement,
    squeezed_occupation,
    stroke_energies,
    thermal_occupation,
    work_and_heat,
)
from .adiabaticity import compute_q_star, linear_ramp, smooth_ramp, sudden_quench_q_star
from .power_search import PowerSearchResult, maximize_power_numeric
from .trap import InfeasibleGeometryError, TrapGeometry, amplitude_for_ratio, default_geometry
from .reservoirs import (
    BathConfig,
    CalibrationRangeError,
    CalibrationTable,
    EstimationError,
    calibrate_squeeze,
    estimate_squeezing,
)
from .engine import (
    CycleRecord,
    CycleSchedule,
    Ensemble,
    SweepRow,
    build_engine_schedule,
    run_cycle,
    run_sweep,
)
from .config import ConfigError, Scenario, load_scenario

__all__ = [
    "__version__",
    "beta_from_temperature",
    "temperature_from_beta",
    "CycleOutputs",
    "CycleParams",
    "NonEngineError",
    "StrokeEnergies",
    "carnot",
    "carnot_crossing_squeeze",
    "curzon_ahlborn",
    "efficiency",
    "efficiency_asymptotic",
    "efficiency_at_max_power",
    "generalized_carnot",
    "optimal_frequency_ratio",
    "squeeze_enhancement",
    "squeezed_occupation",
    "stroke_energies",
    "thermal_occupation",
    "work_and_heat",
    "compute_q_star",
    "linear_ramp",
    "smooth_ramp",
    "sudden_quench_q_star",
    "PowerSearchResult",
    "maximize_power_numeric",
    "InfeasibleGeometryError",
    "TrapGeometry",
    "amplitude_for_ratio",
    "default_geometry",
    "BathConfig",
    "CalibrationRangeError",
    "CalibrationTable",
    "EstimationError",
    "calibrate_squeeze",
    "estimate_squeezing",
    "CycleRecord",
    "CycleSchedule",
    "Ensemble",
    "SweepRow",
    "build_engine_schedule",
    "run_cycle",
    "run_sweep",
    "ConfigError",
    "Scenario",
    "load_scenario",
]
