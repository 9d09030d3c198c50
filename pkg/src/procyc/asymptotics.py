"""Asymptotic correlations between risk estimators and dispersion estimators.

For an iid parent law the limiting correlation of a risk estimator with the
r-th absolute centred sample moment is a ratio of covariances of influence
terms. Each expectation is evaluated by one-dimensional adaptive quadrature
against the model density; nothing here relies on the tabulated closed forms,
which live in :mod:`procyc.closed_form` and are checked against these routes.

The dispersion influence term is ``g(X) = |X - mu|^r - r c_r (X - mu)`` with
``c_r = E[(X - mu)^(r-1) sgn(X - mu)^r]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .dist import DistributionModel, kappa_inverse
from .errors import DomainError, InputError, NumericError
from .estimators import ES_AVG, ES_CHEN, EXPECTILE, VAR, RiskMeasureSpec, es_grid

QUAD_ABS_TOL = 1e-9
_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=400)

INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class CovarianceMatrix2:
    """Symmetric 2x2 covariance ``[[g11, g12], [g12, g22]]``."""

    g11: float
    g12: float
    g22: float

    def __post_init__(self):
        slack = 1e-12 * max(1.0, abs(self.g11), abs(self.g22))
        if self.g11 < -slack or self.g22 < -slack:
            raise DomainError("covariance diagonal must be nonnegative")
        if self.g12 ** 2 > self.g11 * self.g22 + slack:
            raise DomainError("covariance violates Cauchy-Schwarz")

    @property
    def correlation(self) -> float:
        return self.g12 / math.sqrt(self.g11 * self.g22)

    def as_array(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])


def check_moments(dist: DistributionModel, r: int) -> None:
    """Reject (dist, r) pairs whose dispersion influence has infinite variance."""
    if int(r) != r or r < 1:
        raise DomainError(f"dispersion order must be a positive integer, got {r}")
    if not dist.is_gaussian and not dist.nu > 2 * r:
        raise DomainError(f"{dist.label()} needs nu > {2 * r} for the order-{r} dispersion "
                          "estimator to be asymptotically normal")


def _quad(func, a, b):
    val, err = integrate.quad(func, a, b, **_QUAD_OPTS)
    if not err <= QUAD_ABS_TOL:
        raise NumericError(f"quadrature on [{a}, {b}] missed tolerance {QUAD_ABS_TOL}",
                           estimate=val, error_bound=err)
    return val


def expect(dist: DistributionModel, func, lo=-np.inf, hi=np.inf, breaks=()):
    """``E[func(X) 1(lo < X < hi)]`` by quadrature, split at ``breaks``."""
    pts = [lo] + sorted(b for b in breaks if lo < b < hi) + [hi]
    integrand = lambda x: func(x) * dist.pdf(x)  # noqa: E731
    return sum(_quad(integrand, a, b) for a, b in zip(pts[:-1], pts[1:]))


@lru_cache(maxsize=256)
def dispersion_constants(dist: DistributionModel, r: int):
    """Return ``(c_r, E|X-mu|^r, Var g(X))`` for the dispersion influence term."""
    check_moments(dist, r)
    mu = dist.mean
    c_r = expect(dist, lambda x: (x - mu) ** (r - 1) * np.sign(x - mu) ** r, breaks=(mu,))
    m_r = expect(dist, lambda x: abs(x - mu) ** r, breaks=(mu,))
    g = _influence(mu, r, c_r)
    second = expect(dist, lambda x: g(x) ** 2, breaks=(mu,))
    return c_r, m_r, second - m_r ** 2


def _influence(mu, r, c_r):
    return lambda x: abs(x - mu) ** r - r * c_r * (x - mu)


def _tail_cov_indicator(dist: DistributionModel, q: float, p: float, r: int) -> float:
    """``Cov(1(X > q), g(X))`` for ``q`` the p-quantile."""
    c_r, m_r, _ = dispersion_constants(dist, r)
    g = _influence(dist.mean, r, c_r)
    return expect(dist, g, lo=q, breaks=(dist.mean,)) - (1.0 - p) * m_r


def iid_correlation_var_dispersion(dist: DistributionModel, p: float, r: int) -> float:
    """Limiting correlation of the sample p-quantile with the order-r dispersion."""
    _check_level(p)
    _, _, var_g = dispersion_constants(dist, r)
    q = dist.quantile(p)
    cov = _tail_cov_indicator(dist, q, p, r)
    return _clip(cov / math.sqrt(p * (1.0 - p) * var_g))


def iid_correlation_es_dispersion(dist: DistributionModel, p: float, r: int) -> float:
    """Limiting correlation of the threshold-average ES with the dispersion.

    Uses the linear term ``(X - q) 1(X >= q)`` of the ES estimator; its scale
    factor cancels in the correlation.
    """
    _check_level(p)
    c_r, m_r, var_g = dispersion_constants(dist, r)
    mu = dist.mean
    q = dist.quantile(p)
    g = _influence(mu, r, c_r)
    e_h = expect(dist, lambda x: x - q, lo=q)
    e_h2 = expect(dist, lambda x: (x - q) ** 2, lo=q)
    e_hg = expect(dist, lambda x: (x - q) * g(x), lo=q, breaks=(mu,))
    cov = e_hg - e_h * m_r
    return _clip(cov / math.sqrt((e_h2 - e_h ** 2) * var_g))


def iid_correlation_avg_quantiles(dist: DistributionModel, p: float, k: int, r: int) -> float:
    """Limiting correlation of the k-quantile average ES with the dispersion.

    Quantile influence terms ``(p_i - 1(X <= q_i)) / f(q_i)`` are averaged; the
    indicator covariances are ``min(a, b) - a b``.
    """
    levels = es_grid(p, k)
    _, _, var_g = dispersion_constants(dist, r)
    qs = np.array([dist.quantile(float(a)) for a in levels])
    dens = np.array([dist.pdf(q) for q in qs])
    cross = np.array([_tail_cov_indicator(dist, float(q), float(a), r)
                      for q, a in zip(qs, levels)])
    num = float(np.sum(cross / dens))
    a, b = np.meshgrid(levels, levels, indexing="ij")
    ind_cov = (np.minimum(a, b) - a * b) / np.outer(dens, dens)
    return _clip(num / math.sqrt(float(ind_cov.sum()) * var_g))


def iid_correlation(dist: DistributionModel, risk: RiskMeasureSpec, r: int) -> float:
    """Dispatch the generic limiting correlation on the risk estimator kind."""
    if risk.kind == VAR:
        return iid_correlation_var_dispersion(dist, risk.p, r)
    if risk.kind == EXPECTILE:
        # the estimator is a sample quantile at the kappa^-1 level of its own model
        level = kappa_inverse(risk.dist, risk.p)
        return iid_correlation_var_dispersion(dist, level, r)
    if risk.kind == ES_CHEN:
        return iid_correlation_es_dispersion(dist, risk.p, r)
    if risk.kind == ES_AVG:
        return iid_correlation_avg_quantiles(dist, risk.p, risk.k, r)
    raise DomainError(f"unknown risk kind {risk.kind!r}")


def scale_to_procyclicality(rho: float) -> float:
    """Map an estimator correlation to the log-ratio correlation ``-|rho|/sqrt(2)``."""
    if not abs(rho) <= 1.0 + 1e-12:
        raise DomainError(f"|rho| must not exceed 1, got {rho}")
    return 0.0 - min(abs(rho), 1.0) * INV_SQRT2  # 0.0 - x keeps +0.0 at rho = 0


def procyclicality(dist: DistributionModel, risk: RiskMeasureSpec, r: int) -> float:
    """Asymptotic pro-cyclicality of ``risk`` against the order-r dispersion."""
    return scale_to_procyclicality(iid_correlation(dist, risk, r))


def longrun_covariance(pairs, max_lag: int) -> CovarianceMatrix2:
    """Bartlett-weighted long-run covariance of a bivariate series.

    ``Omega = G_0 + sum_{l=1}^{L} (1 - l/(L+1)) (G_l + G_l')`` with ``G_l`` the
    lag-l autocovariance (divisor N, demeaned). ``max_lag=0`` gives the plain
    biased sample covariance.
    """
    x = np.asarray(pairs, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise InputError("pairs must have shape (N, 2)")
    if int(max_lag) != max_lag or max_lag < 0:
        raise InputError("max_lag must be a nonnegative integer")
    n = x.shape[0]
    if n < max_lag + 2:
        raise InputError(f"need at least {max_lag + 2} observations, got {n}")
    if not np.all(np.isfinite(x)):
        raise InputError("pairs contain NaN or infinite values")
    e = x - x.mean(axis=0)
    omega = e.T @ e / n
    for lag in range(1, int(max_lag) + 1):
        w = 1.0 - lag / (max_lag + 1.0)
        gamma = e[lag:].T @ e[:-lag] / n
        omega += w * (gamma + gamma.T)
    return CovarianceMatrix2(float(omega[0, 0]), float(0.5 * (omega[0, 1] + omega[1, 0])),
                             float(omega[1, 1]))


def _check_level(p):
    if not 0.0 < p < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {p}")


def _clip(rho: float) -> float:
    return max(-1.0, min(1.0, rho))
