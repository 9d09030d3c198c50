"""iid and GARCH(1,1) sample paths, residual extraction and a QMLE fitter.

Time indexing follows the return convention ``X_{t+1} = eps_t sigma_t`` with
``sigma_t^2 = omega + alpha X_t^2 + beta sigma_{t-1}^2``. In array form
``x[t] = eps[t] * sigma[t]`` and
``sigma[t]^2 = omega + alpha x[t-1]^2 + beta sigma[t-1]^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import kernels
from .dist import DistributionModel, gaussian
from .errors import DomainError, InputError, InsufficientDataError
from .rng import check_seed, stream

DEFAULT_BURN_IN = 252
MIN_FIT_LENGTH = 500


@dataclass(frozen=True)
class GarchParams:
    """GARCH(1,1) coefficients ``(omega, alpha, beta)``."""

    omega: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("omega", "alpha", "beta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, float(v))
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if self.alpha < 0 or self.beta < 0:
            raise DomainError("alpha and beta must be nonnegative")

    @property
    def persistence(self) -> float:
        return self.alpha + self.beta

    @property
    def stationary(self) -> bool:
        """Covariance stationarity, ``alpha + beta < 1``."""
        return self.persistence < 1.0

    @property
    def unconditional_variance(self) -> float:
        if not self.stationary:
            return math.inf
        return self.omega / (1.0 - self.persistence)


@dataclass(frozen=True)
class SimulationPlan:
    """Length, discarded prefix, seed and innovation law of a simulated path."""

    n: int
    burn_in: int = 0
    seed: int = 0
    innovation: DistributionModel = field(default_factory=gaussian)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n}")
        if int(self.burn_in) != self.burn_in or self.burn_in < 0:
            raise InputError(f"burn_in must be a nonnegative integer, got {self.burn_in}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "burn_in", int(self.burn_in))
        object.__setattr__(self, "seed", check_seed(self.seed))


def draw_innovations(dist: DistributionModel, rng: np.random.Generator, size) -> np.ndarray:
    """Unit-variance draws from ``dist``; Student draws are rescaled."""
    if dist.is_gaussian:
        return rng.standard_normal(size)
    return rng.standard_t(dist.nu, size) * dist.scale


def simulate_iid(plan: SimulationPlan, *, index: int = 0) -> np.ndarray:
    """``plan.n`` draws from the innovation law (stream ``index`` of the seed)."""
    return draw_innovations(plan.innovation, stream(plan.seed, index), plan.n)


def _check_params(params: GarchParams, allow_nonstationary: bool):
    if not params.stationary and not allow_nonstationary:
        raise DomainError(f"alpha + beta = {params.persistence:g} >= 1 is not covariance "
                          "stationary; pass allow_nonstationary=True to simulate anyway")


def _initial_variance(params: GarchParams, sigma2_init):
    if sigma2_init is not None:
        if not sigma2_init > 0:
            raise DomainError("sigma2_init must be positive")
        return float(sigma2_init)
    # non-stationary runs have no stationary level; start from omega
    return params.unconditional_variance if params.stationary else params.omega


def simulate_garch11(params: GarchParams, plan: SimulationPlan, *,
                     allow_nonstationary: bool = False, sigma2_init: float | None = None,
                     return_innovations: bool = False, index: int = 0):
    """Simulate a GARCH(1,1) path.

    The recursion starts at the stationary variance (or ``sigma2_init``) and
    the first ``plan.burn_in`` points are dropped.

    Returns
    -------
    x, sigma : ndarray
        Observations and conditional volatilities, each of length ``plan.n``.
    eps : ndarray
        The innovations behind ``x``; only with ``return_innovations=True``.
    """
    _check_params(params, allow_nonstationary)
    eps = draw_innovations(plan.innovation, stream(plan.seed, index), plan.burn_in + plan.n)
    x, s2 = kernels.garch11_simulate(eps[None, :], params.omega, params.alpha, params.beta,
                                     _initial_variance(params, sigma2_init))
    b = plan.burn_in
    out = (x[0, b:], np.sqrt(s2[0, b:]))
    if return_innovations:
        return out + (eps[b:],)
    return out


def simulate_garch11_batch(params: GarchParams, plan: SimulationPlan, indices) -> np.ndarray:
    """Rows of independent paths; row ``j`` equals ``simulate_garch11(..., index=indices[j])[0]``."""
    _check_params(params, False)
    indices = list(indices)
    m = plan.burn_in + plan.n
    eps = np.empty((len(indices), m))
    for row, idx in enumerate(indices):
        eps[row] = draw_innovations(plan.innovation, stream(plan.seed, idx), m)
    x, _ = kernels.garch11_simulate(eps, params.omega, params.alpha, params.beta,
                                    params.unconditional_variance)
    return x[:, plan.burn_in:]


def _as_series(series) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise InputError("series must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise InputError("series contains NaN or infinite values")
    return x


def filter_variance(series, params: GarchParams, sigma2_init: float) -> np.ndarray:
    """Conditional variances ``sigma[t]^2`` of ``series`` under ``params``."""
    return kernels.garch11_filter(_as_series(series), params.omega, params.alpha,
                                  params.beta, sigma2_init)


def extract_residuals(series, params: GarchParams, burn_in: int = DEFAULT_BURN_IN, *,
                      sigma2_init: float | None = None) -> np.ndarray:
    """Standardized residuals ``x[t] / sigma_hat[t]`` for ``t >= burn_in``.

    The recursion runs over the whole series. Unless ``sigma2_init`` is given,
    it starts from the sample variance of the first ``burn_in`` points, which
    are then only used to warm up the volatility.

    Raises
    ------
    InsufficientDataError
        If the series has no more than ``burn_in + 1`` points.
    """
    x = _as_series(series)
    if int(burn_in) != burn_in or burn_in < 0:
        raise InputError(f"burn_in must be a nonnegative integer, got {burn_in}")
    burn_in = int(burn_in)
    if x.size <= burn_in + 1:
        raise InsufficientDataError(f"series of length {x.size} is too short for a burn-in "
                                    f"of {burn_in}")
    if sigma2_init is None:
        if burn_in < 2:
            raise InputError("a burn-in of at least 2 points is needed to initialize the "
                             "variance; otherwise pass sigma2_init")
        sigma2_init = float(np.var(x[:burn_in]))
        if sigma2_init == 0.0:
            # a flat warm-up window still gives sigma^2 >= omega from t=1 on
            sigma2_init = params.omega
    elif not sigma2_init > 0:
        raise DomainError("sigma2_init must be positive")
    s2 = filter_variance(x, params, sigma2_init)
    return x[burn_in:] / np.sqrt(s2[burn_in:])


@dataclass(frozen=True)
class GarchFit:
    """Result of :func:`fit_garch11_qmle`."""

    params: GarchParams
    neg_loglik: float
    converged: bool
    iterations: int
    warnings: tuple = ()


_EDGE = 1e-6
_BOUNDARY = 1e-3


def fit_garch11_qmle(series, *, max_iter: int = 4000) -> GarchFit:
    """Gaussian quasi-maximum-likelihood fit of a GARCH(1,1).

    Nelder-Mead on ``(omega / v, alpha, beta)`` with ``v`` the sample variance,
    started at ``(0.05, 0.05, 0.90)``, with box bounds and the stationarity
    region ``alpha + beta < 1`` enforced by an infinite objective outside it.
    The recursion is initialized at ``v``. A fit ending on the boundary, or
    without convergence, carries a warning rather than an error.

    Raises
    ------
    InsufficientDataError
        Fewer than 500 observations.
    InputError
        Zero-variance input.
    """
    x = _as_series(series)
    if x.size < MIN_FIT_LENGTH:
        raise InsufficientDataError(f"need at least {MIN_FIT_LENGTH} observations, got {x.size}")
    if np.all(x == x[0]):
        raise InputError("cannot fit a GARCH model to a constant series")
    v = float(np.var(x))

    def objective(theta):
        w, a, b = theta
        if w <= 0 or a < 0 or b < 0 or a + b >= 1.0 - _EDGE:
            return np.inf
        return kernels.garch11_nll(x, w * v, a, b, v)

    res = optimize.minimize(objective, x0=np.array([0.05, 0.05, 0.90]), method="Nelder-Mead",
                            bounds=[(1e-8, 10.0), (0.0, 1.0), (0.0, 1.0)],
                            options=dict(maxiter=max_iter, xatol=1e-8, fatol=1e-10))
    w, a, b = (float(t) for t in res.x)
    notes = []
    if not res.success:
        notes.append(f"optimizer did not converge: {res.message}")
    if a < _BOUNDARY or b < _BOUNDARY:
        notes.append("estimate on the alpha/beta >= 0 boundary")
    if a + b > 1.0 - 1e-4:
        notes.append("estimate on the stationarity boundary")
    return GarchFit(GarchParams(w * v, a, b), float(res.fun) + 0.5 * x.size * math.log(2 * math.pi),
                    bool(res.success), int(res.nit), tuple(notes))
