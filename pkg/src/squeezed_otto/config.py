"""Scenario configuration: sectioned key-value files with units in key names.

A scenario file is standard INI text; every physical key carries its unit in
the name (omega_rad0_2pi_mhz = 3.0 means 2pi x 3.0 MHz).  Values omitted in
the file fall back to the defaults below; command-line flags override file
values.  The effective configuration is normalized to a canonical text form
whose SHA-256 hash is stamped into every output file.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import math
from dataclasses import dataclass
from pathlib import Path

from .constants import ATOMIC_MASS
from .trap import TrapGeometry

_TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Bad scenario file or override: unknown key, wrong type, out of range."""


DEFAULTS: dict[str, dict[str, str]] = {
    "run": {
        "seed": "20260815",
        "ensemble": "1000",
        "repetitions": "20",
    },
    "trap": {
        "omega_rad0_2pi_mhz": "3.0",
        "omega_ax_2pi_khz": "36.0",
        "theta_deg": "20.0",
        "r0_mm": "1.5",
        "ion_mass_amu": "39.9625909",
        "a_max_mm": "0.9",
    },
    "baths": {
        "t_cold_mk": "1.0",
        "beta2_over_beta1": "0.88",
        "gamma_over_omega_rad0": "0.05",
        "contact_gamma_t": "10.0",
    },
    "integration": {
        "steps_per_radial_period": "200",
    },
    "cycle": {
        "squeeze_r_target": "0.4",
        "trace_points_per_stroke": "40",
    },
    "sweep": {
        "r_targets": "0.0, 0.1, 0.2, 0.3, 0.4",
    },
    "calibration": {
        "delta_omega_fractions": "0.0, 0.05, 0.10, 0.15, 0.20, 0.25",
        "ensemble": "2000",
    },
    "analytic": {
        "beta_ratios": "0.9, 0.6, 0.3",
        "r_max": "3.0",
        "r_points": "121",
        "table_beta_ratios": "0.88, 0.9, 0.6, 0.3",
        "table_r_values": "0.0, 0.1, 0.2, 0.25823, 0.3, 0.4, 0.5, 1.0, 2.0, 3.0",
    },
}


@dataclass(frozen=True)
class Scenario:
    """Validated, unit-converted run parameters (SI)."""

    seed: int
    ensemble: int
    repetitions: int
    geometry: TrapGeometry
    t_cold: float  # K
    t_hot: float  # K
    beta2_over_beta1: float
    gamma: float  # 1/s
    contact_gamma_t: float
    steps_per_period: int
    squeeze_r_target: float
    trace_points: int
    sweep_r_targets: tuple[float, ...]
    calibration_fractions: tuple[float, ...]
    calibration_ensemble: int
    fig1_beta_ratios: tuple[float, ...]
    fig1_r_max: float
    fig1_r_points: int
    table_beta_ratios: tuple[float, ...]
    table_r_values: tuple[float, ...]
    config_text: str

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.config_text.encode()).hexdigest()[:16]


def _parse_floats(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    except ValueError as err:
        raise ConfigError(f"expected a list of numbers, got {raw!r}") from err


def _merged_parser(path: str | Path | None,
                   overrides: dict[tuple[str, str], str] | None) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_dict(DEFAULTS)
    if path is not None:
        file_parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path, encoding="utf-8") as fh:
                file_parser.read_file(fh)
        except OSError as err:
            raise ConfigError(f"cannot read config file {path}: {err}") from err
        except configparser.Error as err:
            raise ConfigError(f"malformed config file {path}: {err}") from err
        for section in file_parser.sections():
            if section not in DEFAULTS:
                raise ConfigError(f"unknown config section [{section}]")
            for key, value in file_parser.items(section):
                if key not in DEFAULTS[section]:
                    raise ConfigError(f"unknown config key {key!r} in section [{section}]")
                parser.set(section, key, value)
    for (section, key), value in (overrides or {}).items():
        if section not in DEFAULTS or key not in DEFAULTS[section]:
            raise ConfigError(f"unknown override {section}.{key}")
        parser.set(section, key, str(value))
    return parser


def _canonical_text(parser: configparser.ConfigParser) -> str:
    buf = io.StringIO()
    for section in sorted(DEFAULTS):
        buf.write(f"[{section}]\n")
        for key in sorted(DEFAULTS[section]):
            buf.write(f"{key} = {parser.get(section, key).strip()}\n")
    return buf.getvalue()


def load_scenario(path: str | Path | None = None,
                  overrides: dict[tuple[str, str], str] | None = None) -> Scenario:
    """Build a validated Scenario from defaults, an optional file, and overrides.

    Raises ConfigError on unknown keys/sections, type errors and
    out-of-range values.
    """
    parser = _merged_parser(path, overrides)
    try:
        seed = parser.getint("run", "seed")
        ensemble = parser.getint("run", "ensemble")
        repetitions = parser.getint("run", "repetitions")
        omega_rad0 = _TWO_PI * 1e6 * parser.getfloat("trap", "omega_rad0_2pi_mhz")
        omega_ax = _TWO_PI * 1e3 * parser.getfloat("trap", "omega_ax_2pi_khz")
        theta = math.radians(parser.getfloat("trap", "theta_deg"))
        r0 = 1e-3 * parser.getfloat("trap", "r0_mm")
        ion_mass = ATOMIC_MASS * parser.getfloat("trap", "ion_mass_amu")
        a_max = 1e-3 * parser.getfloat("trap", "a_max_mm")
        t_cold = 1e-3 * parser.getfloat("baths", "t_cold_mk")
        beta_ratio = parser.getfloat("baths", "beta2_over_beta1")
        gamma_frac = parser.getfloat("baths", "gamma_over_omega_rad0")
        contact_gamma_t = parser.getfloat("baths", "contact_gamma_t")
        steps_per_period = parser.getint("integration", "steps_per_radial_period")
        squeeze_r_target = parser.getfloat("cycle", "squeeze_r_target")
        trace_points = parser.getint("cycle", "trace_points_per_stroke")
        sweep_r_targets = _parse_floats(parser.get("sweep", "r_targets"))
        cal_fracs = _parse_floats(parser.get("calibration", "delta_omega_fractions"))
        cal_ensemble = parser.getint("calibration", "ensemble")
        fig1_ratios = _parse_floats(parser.get("analytic", "beta_ratios"))
        fig1_r_max = parser.getfloat("analytic", "r_max")
        fig1_r_points = parser.getint("analytic", "r_points")
        table_ratios = _parse_floats(parser.get("analytic", "table_beta_ratios"))
        table_r = _parse_floats(parser.get("analytic", "table_r_values"))
    except ValueError as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"bad config value: {err}") from err

    if ensemble < 2:
        raise ConfigError(f"ensemble must be >= 2, got {ensemble}")
    if repetitions < 1:
        raise ConfigError(f"repetitions must be >= 1, got {repetitions}")
    if not 0.0 < beta_ratio < 1.0:
        raise ConfigError(f"beta2_over_beta1 must lie in (0, 1), got {beta_ratio}")
    if t_cold <= 0.0:
        raise ConfigError(f"t_cold_mk must be positive, got {t_cold * 1e3}")
    if not 0.0 < gamma_frac < 0.5:
        raise ConfigError(f"gamma_over_omega_rad0 must lie in (0, 0.5), got {gamma_frac}")
    if contact_gamma_t <= 0.0:
        raise ConfigError("contact_gamma_t must be positive")
    if steps_per_period < 100:
        raise ConfigError(f"steps_per_radial_period must be >= 100, got {steps_per_period}")
    if squeeze_r_target < 0.0:
        raise ConfigError("squeeze_r_target must be >= 0")
    if trace_points < 1:
        raise ConfigError("trace_points_per_stroke must be >= 1")
    if not sweep_r_targets or any(r < 0.0 for r in sweep_r_targets):
        raise ConfigError("sweep r_targets must be a non-empty list of values >= 0")
    if not cal_fracs or any(not 0.0 <= f < 1.0 for f in cal_fracs):
        raise ConfigError("calibration fractions must lie in [0, 1)")
    if cal_ensemble < 100:
        raise ConfigError("calibration ensemble must be >= 100")
    if not fig1_ratios or any(not 0.0 < q < 1.0 for q in fig1_ratios):
        raise ConfigError("analytic beta_ratios must lie in (0, 1)")
    if fig1_r_max <= 0.0 or fig1_r_points < 2:
        raise ConfigError("analytic r grid needs r_max > 0 and r_points >= 2")
    if not table_ratios or any(not 0.0 < q < 1.0 for q in table_ratios):
        raise ConfigError("analytic table_beta_ratios must lie in (0, 1)")
    if not table_r or any(r < 0.0 for r in table_r):
        raise ConfigError("analytic table_r_values must be >= 0")

    try:
        geometry = TrapGeometry(omega_ax=omega_ax, omega_rad0=omega_rad0, theta=theta,
                                r0=r0, ion_mass=ion_mass, a_max=a_max)
    except ValueError as err:
        raise ConfigError(f"bad trap geometry: {err}") from err

    return Scenario(
        seed=seed,
        ensemble=ensemble,
        repetitions=repetitions,
        geometry=geometry,
        t_cold=t_cold,
        t_hot=t_cold / beta_ratio,
        beta2_over_beta1=beta_ratio,
        gamma=gamma_frac * omega_rad0,
        contact_gamma_t=contact_gamma_t,
        steps_per_period=steps_per_period,
        squeeze_r_target=squeeze_r_target,
        trace_points=trace_points,
        sweep_r_targets=sweep_r_targets,
        calibration_fractions=cal_fracs,
        calibration_ensemble=cal_ensemble,
        fig1_beta_ratios=fig1_ratios,
        fig1_r_max=fig1_r_max,
        fig1_r_points=fig1_r_points,
        table_beta_ratios=table_ratios,
        table_r_values=table_r,
        config_text=_canonical_text(parser),
    )
