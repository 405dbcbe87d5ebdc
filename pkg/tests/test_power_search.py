"""Numeric power maximization against the high-temperature closed forms."""

import numpy as np
import pytest

from squeezed_otto.power_search import maximize_power_numeric
from squeezed_otto.thermo import (
    NonEngineError,
    efficiency_at_max_power,
    optimal_frequency_ratio,
)

# deep classical regime: beta*hbar*omega ~ 1e-6 at omega1 = 1e6
BETA_HOT_CLASSICAL = 1e22


def test_argmax_matches_closed_form_single_point():
    beta2 = BETA_HOT_CLASSICAL
    beta1 = beta2 / 0.88
    res = maximize_power_numeric(beta1, beta2, 0.4, omega1=1.0e6, tau=1.0)
    assert res.ratio == pytest.approx(optimal_frequency_ratio(beta1, beta2, 0.4), rel=5e-3)
    assert res.efficiency == pytest.approx(efficiency_at_max_power(beta1, beta2, 0.4), rel=5e-3)
    assert res.n_grid_maxima == 1
    assert res.omega2 == res.ratio * 1.0e6


def test_argmax_matches_closed_form_random_grid():
    # the closed forms hold in the high-temperature limit; 0.5% agreement
    rng = np.random.default_rng(23)
    for _ in range(40):
        q = rng.uniform(0.3, 0.95)
        r = rng.uniform(0.0, 1.2)
        beta2 = BETA_HOT_CLASSICAL * 10 ** rng.uniform(-1, 1)
        beta1 = beta2 / q
        res = maximize_power_numeric(beta1, beta2, r, omega1=1.0e6, tau=1.0)
        assert res.ratio == pytest.approx(
            optimal_frequency_ratio(beta1, beta2, r), rel=5e-3)
        assert res.efficiency == pytest.approx(
            efficiency_at_max_power(beta1, beta2, r), rel=5e-3)


def test_power_positive_and_scales_with_tau():
    beta2 = BETA_HOT_CLASSICAL
    beta1 = beta2 / 0.7
    res1 = maximize_power_numeric(beta1, beta2, 0.5, omega1=1.0e6, tau=1.0)
    res2 = maximize_power_numeric(beta1, beta2, 0.5, omega1=1.0e6, tau=4.0)
    assert res1.power > 0.0
    assert res2.power == pytest.approx(res1.power / 4.0, rel=1e-9)
    assert res2.ratio == pytest.approx(res1.ratio, rel=1e-6)


def test_no_engine_window_raises():
    # equal-ish temperatures and no squeezing: ratio grid has no work > 0
    beta2 = BETA_HOT_CLASSICAL
    with pytest.raises(NonEngineError):
        maximize_power_numeric(beta2 * 1.0000001, beta2, 0.0, omega1=1.0e6,
                               tau=1.0, ratio_max=5.0)


def test_parameter_validation():
    beta2 = BETA_HOT_CLASSICAL
    with pytest.raises(ValueError):
        maximize_power_numeric(beta2 / 0.5, beta2, 0.0, omega1=-1.0, tau=1.0)
    with pytest.raises(ValueError):
        maximize_power_numeric(beta2 / 0.5, beta2, 0.0, omega1=1.0e6, tau=1.0,
                               ratio_max=0.5)
