import math

import numpy as np
import pytest
from scipy import stats

from procyc.dist import student_t
from procyc.errors import DomainError, InputError, InsufficientDataError
from procyc.processes import (GarchParams, SimulationPlan, extract_residuals, fit_garch11_qmle,
                              simulate_garch11, simulate_garch11_batch, simulate_iid)


def test_params_validation():
    with pytest.raises(DomainError):
        GarchParams(0.0, 0.1, 0.1)
    with pytest.raises(DomainError):
        GarchParams(0.1, -0.1, 0.1)
    with pytest.raises(DomainError):
        GarchParams(0.1, 0.1, math.nan)
    p = GarchParams(0.05 * 0.1, 0.05, 0.85)
    assert p.stationary
    assert p.unconditional_variance == pytest.approx(0.05)
    assert not GarchParams(0.1, 0.5, 0.5).stationary


def test_plan_validation():
    with pytest.raises(InputError):
        SimulationPlan(0)
    with pytest.raises(InputError):
        SimulationPlan(10, burn_in=-1)
    with pytest.raises(InputError):
        SimulationPlan(10, seed=-3)
    with pytest.raises(InputError):
        SimulationPlan(10, seed=2 ** 64)


def test_iid_determinism_and_streams():
    plan = SimulationPlan(1000, seed=42)
    assert np.array_equal(simulate_iid(plan), simulate_iid(plan))
    assert not np.array_equal(simulate_iid(plan, index=0), simulate_iid(plan, index=1))
    assert not np.array_equal(simulate_iid(plan), simulate_iid(SimulationPlan(1000, seed=43)))


def test_iid_gaussian_moments():
    n = 10 ** 6
    x = simulate_iid(SimulationPlan(n, seed=1))
    assert abs(x.mean()) < 4 / math.sqrt(n)
    assert abs(x.var() - 1) < 0.01


def test_iid_student_moments():
    n = 10 ** 6
    x = simulate_iid(SimulationPlan(n, seed=2, innovation=student_t(5)))
    assert abs(x.var() - 1) < 0.05
    kurt = stats.kurtosis(x, fisher=False)
    assert kurt == pytest.approx(3 + 6 / (5 - 4), rel=0.2)


def test_garch_constant_volatility():
    p = GarchParams(0.04, 0.0, 0.0)
    plan = SimulationPlan(5000, burn_in=10, seed=3)
    x, sigma, eps = simulate_garch11(p, plan, return_innovations=True)
    assert np.all(sigma == math.sqrt(0.04))
    assert np.array_equal(x, eps * math.sqrt(0.04))
    assert x.var() == pytest.approx(0.04, rel=0.05)


def test_garch_unconditional_variance():
    p = GarchParams(0.05 * (1 - 0.9), 0.05, 0.85)
    x, sigma = simulate_garch11(p, SimulationPlan(10 ** 5, burn_in=1000, seed=4))
    assert x.var() == pytest.approx(0.05, rel=0.10)
    assert np.all(sigma ** 2 >= p.omega)
    assert x.size == sigma.size == 10 ** 5


def test_stationarity_guard():
    p = GarchParams(0.01, 0.2, 0.8)
    with pytest.raises(DomainError):
        simulate_garch11(p, SimulationPlan(100))
    with pytest.raises(DomainError):
        simulate_garch11_batch(p, SimulationPlan(100), [0, 1])
    x, sigma = simulate_garch11(p, SimulationPlan(100), allow_nonstationary=True)
    assert np.all(np.isfinite(x)) and sigma[0] ** 2 == pytest.approx(0.01)


def test_batch_rows_match_single_paths():
    p = GarchParams(0.01, 0.08, 0.9)
    plan = SimulationPlan(300, burn_in=50, seed=9, innovation=student_t(6))
    batch = simulate_garch11_batch(p, plan, [3, 0, 7])
    for row, idx in zip(batch, [3, 0, 7]):
        assert np.array_equal(row, simulate_garch11(p, plan, index=idx)[0])


def test_residual_inversion_identity():
    p = GarchParams(0.01, 0.08, 0.9)
    x, sigma, eps = simulate_garch11(p, SimulationPlan(20000, burn_in=500, seed=5),
                                     return_innovations=True)
    res = extract_residuals(x, p, 0, sigma2_init=sigma[0] ** 2)
    assert np.max(np.abs(res - eps) / np.abs(eps)) <= 1e-10


def test_residuals_with_burn_in():
    p = GarchParams(0.01, 0.08, 0.9)
    n = 10 ** 5
    x, _ = simulate_garch11(p, SimulationPlan(n + 252, seed=6))
    res = extract_residuals(x, p)
    assert res.size == n
    assert abs(res.mean()) < 4 / math.sqrt(n)
    assert abs(res.var() - 1) < 0.02
    assert np.array_equal(res, extract_residuals(x, p))


def test_residuals_constant_volatility_exact():
    p = GarchParams(0.25, 0.0, 0.0)
    x = simulate_iid(SimulationPlan(600, seed=7))
    res = extract_residuals(x, p, 252)
    assert np.array_equal(res, x[252:] / 0.5)


def test_residual_errors():
    p = GarchParams(0.01, 0.08, 0.9)
    with pytest.raises(InsufficientDataError):
        extract_residuals(np.ones(253), p, 252)
    with pytest.raises(InputError):
        extract_residuals(np.ones(20), p, 1)
    with pytest.raises(DomainError):
        extract_residuals(np.ones(20), p, 0, sigma2_init=0.0)


def test_qmle_recovers_parameters():
    true = GarchParams(0.01, 0.08, 0.90)
    x, _ = simulate_garch11(true, SimulationPlan(20000, burn_in=500, seed=8))
    fit = fit_garch11_qmle(x)
    for name in ("omega", "alpha", "beta"):
        assert getattr(fit.params, name) == pytest.approx(getattr(true, name), rel=0.15)
    assert fit.converged and fit.params.stationary


def test_qmle_iid_input_has_no_arch_effect():
    x = simulate_iid(SimulationPlan(20000, seed=9))
    fit = fit_garch11_qmle(x)
    assert fit.params.alpha <= 0.03


def test_qmle_input_errors():
    with pytest.raises(InputError):
        fit_garch11_qmle(np.full(1000, 0.3))
    with pytest.raises(InsufficientDataError):
        fit_garch11_qmle(np.random.default_rng(0).standard_normal(499))


def test_qmle_boundary_warning():
    # large squares always followed by small ones push alpha onto its zero bound
    signs = np.random.default_rng(1).choice([-1.0, 1.0], 1000)
    x = signs * np.tile([3.0, 0.1], 500)
    fit = fit_garch11_qmle(x)
    assert fit.warnings
