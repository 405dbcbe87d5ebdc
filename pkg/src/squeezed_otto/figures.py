"""Figure rendering for the report path.

Each function takes already-computed arrays (the same data that lands in the
delimited files) and writes a PNG next to them.  matplotlib runs on the Agg
backend so the CLI works headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .constants import K_BOLTZMANN  # noqa: E402


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_efficiency_curves(path: str | Path, r_grid: np.ndarray,
                             curves: Mapping[float, Mapping[str, np.ndarray]]) -> Path:
    """Efficiency at maximum power vs squeezing, one panel per bath ratio.

    curves[beta_ratio] holds arrays keyed 'eta_star', 'eta_gen_carnot',
    'eta_asymptotic'; horizontal guides mark the unsqueezed Carnot and
    Curzon-Ahlborn values.
    """
    ratios = sorted(curves, reverse=True)
    fig, axes = plt.subplots(1, len(ratios), figsize=(4.2 * len(ratios), 3.6),
                             sharex=True, sharey=True)
    axes = np.atleast_1d(axes)
    for ax, q in zip(axes, ratios):
        data = curves[q]
        ax.plot(r_grid, data["eta_star"], "b-", lw=1.8, label="max-power efficiency")
        ax.plot(r_grid, data["eta_gen_carnot"], "k--", lw=1.2, label="generalized Carnot")
        ax.plot(r_grid, data["eta_asymptotic"], "r:", lw=1.2, label="large-r asymptote")
        ax.axhline(1.0 - q, color="0.4", ls="-.", lw=0.9, label="Carnot (r=0)")
        ax.axhline(1.0 - np.sqrt(q), color="0.6", ls=":", lw=0.9, label="Curzon-Ahlborn")
        ax.set_title(f"beta2/beta1 = {q:g}")
        ax.set_xlabel("squeezing parameter r")
        ax.set_ylim(0.0, 1.05)
    axes[0].set_ylabel("efficiency")
    axes[0].legend(fontsize=7, loc="lower right")
    fig.suptitle("Otto engine at maximum power with a squeezed hot reservoir")
    return _finish(fig, path)


def render_cycle(path: str | Path,
                 thermal: Mapping[str, np.ndarray],
                 squeezed: Mapping[str, np.ndarray],
                 corners: Sequence[Mapping[str, float]]) -> Path:
    """Energy-frequency diagram of the simulated cycle plus z-resolved inset.

    thermal/squeezed map keys 'omega', 'z', 'e_rad' to per-snapshot arrays.
    corners is the labelled corner list of the squeezed run.
    """
    fig, (ax_w, ax_z) = plt.subplots(1, 2, figsize=(9.2, 3.8))
    to_mk = 1e3 / K_BOLTZMANN
    for data, color, label in ((thermal, "0.55", "thermal (r = 0)"),
                               (squeezed, "tab:red", "squeezed")):
        ax_w.plot(data["omega"] / (2e6 * np.pi), data["e_rad"] * to_mk,
                  "-", color=color, lw=1.4, label=label)
        ax_z.plot(data["z"] * 1e3, data["e_rad"] * to_mk,
                  "-", color=color, lw=1.4, label=label)
    for corner in corners:
        ax_w.plot(corner["omega"] / (2e6 * np.pi), corner["e_rad"] * to_mk,
                  "ko", ms=4)
        ax_w.annotate(corner["label"],
                      (corner["omega"] / (2e6 * np.pi), corner["e_rad"] * to_mk),
                      textcoords="offset points", xytext=(5, 4), fontsize=8)
    ax_w.set_xlabel("radial frequency (2pi MHz)")
    ax_w.set_ylabel("mean radial energy (mK, units of k_B)")
    ax_w.set_title("cycle in the energy-frequency plane")
    ax_w.legend(fontsize=8)
    ax_z.set_xlabel("axial position (mm)")
    ax_z.set_title("cycle along the trap axis")
    ax_z.legend(fontsize=8)
    return _finish(fig, path)


def render_sweep(path: str | Path, rows: Sequence[Mapping[str, float | None]]) -> Path:
    """Simulated efficiency vs squeezing with analytic guides and error bars."""
    feasible = [row for row in rows if row.get("eta_sim") is not None]
    r = np.array([row["r_target"] for row in feasible])
    eta = np.array([row["eta_sim"] for row in feasible])
    err = np.array([row.get("eta_err") or 0.0 for row in feasible])
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.errorbar(r, eta, yerr=err, fmt="o", color="tab:blue", ms=5,
                capsize=3, label="simulation")
    if feasible:
        r_smooth = np.linspace(0.0, max(r.max(), 0.01), 200)
        first = feasible[0]
        ax.plot(r_smooth, [_eta_model(rr, first) for rr in r_smooth],
                "b-", lw=1.2, label="max-power theory")
        ax.plot(r_smooth, [_eta_gen(rr, first) for rr in r_smooth],
                "k--", lw=1.0, label="generalized Carnot")
        ax.axhline(first["eta_carnot"], color="0.4", ls="-.", lw=0.9,
                   label="Carnot (r=0)")
        ax.axhline(first["eta_curzon_ahlborn"], color="0.6", ls=":", lw=0.9,
                   label="Curzon-Ahlborn")
    ax.set_xlabel("squeezing parameter r")
    ax.set_ylabel("efficiency")
    ax.set_title("engine efficiency vs reservoir squeezing")
    ax.legend(fontsize=8, loc="upper left")
    return _finish(fig, path)


def _eta_model(r: float, row: Mapping[str, float]) -> float:
    from .thermo import efficiency_at_max_power
    q = row["eta_carnot"]
    return efficiency_at_max_power(1.0, 1.0 - q, r)


def _eta_gen(r: float, row: Mapping[str, float]) -> float:
    from .thermo import generalized_carnot
    q = row["eta_carnot"]
    return generalized_carnot(1.0, 1.0 - q, r)


def render_calibration(path: str | Path, rows: Sequence[Mapping[str, float]]) -> Path:
    """Measured squeezing and energy gain vs drive amplitude."""
    frac = np.array([row["delta_omega_fraction"] for row in rows])
    r_est = np.array([row["r_est"] for row in rows])
    gain = np.array([row["e_after"] / row["e_before"] for row in rows])
    fig, (ax_r, ax_e) = plt.subplots(1, 2, figsize=(8.6, 3.6))
    ax_r.plot(frac, r_est, "o-", color="tab:blue", label="measured")
    ax_r.plot(frac, np.log((1 + frac) / np.maximum(1 - frac, 1e-12)), "k--",
              lw=1.0, label="two-segment model")
    ax_r.set_xlabel("frequency step (fraction of anchor)")
    ax_r.set_ylabel("squeezing parameter r")
    ax_r.legend(fontsize=8)
    ax_e.plot(r_est, gain, "o-", color="tab:red", label="measured")
    ax_e.plot(r_est, np.cosh(2 * r_est), "k--", lw=1.0, label="cosh(2r)")
    ax_e.set_xlabel("measured r")
    ax_e.set_ylabel("energy after / before")
    ax_e.legend(fontsize=8)
    fig.suptitle("squeeze drive calibration")
    return _finish(fig, path)
