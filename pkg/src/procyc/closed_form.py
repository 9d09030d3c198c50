"""Tabulated closed forms of the asymptotic pro-cyclicality for iid models.

These are the explicit Gaussian and Student-t expressions for VaR, the
threshold-average ES and the expectile against the sample variance (r=2) and
the sample MAD (r=1), including the ``-1/sqrt(2)`` log-ratio factor. Student
entries are written in the unscaled t coordinate (correlations are scale free).

Two deliberate departures from the printed expressions, both forced by the
generic covariance formulas in :mod:`procyc.asymptotics`:

* the MAD entries were written for ``q(p) >= 0``. For lower levels the centring
  term ``(1 - p)`` becomes ``p``, i.e. ``min(p, 1 - p)`` in general, and the ES
  integrand flips sign below the median.
* in the Gaussian ES/MAD entry the factor ``sqrt(2/pi)`` multiplies
  ``(1 - u) / phi(Phi^-1(u))``; it is the Gaussian ``E|X|``, as the Student
  entry's large-nu limit confirms.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .asymptotics import INV_SQRT2
from .dist import DistributionModel, gamma_ratio, gaussian, kappa_inverse
from .errors import CapabilityError, DomainError, NumericError
from .estimators import ES_CHEN, EXPECTILE, VAR, RiskMeasureSpec

DOUBLE_RTOL = 1e-7
_INNER = dict(epsabs=0.0, epsrel=1e-11, limit=200)
# user kernels evaluate 1 - F(x) by subtraction; its round-off floor needs an absolute cap
_INNER_KERNEL = dict(epsabs=1e-15, epsrel=1e-11, limit=200)
_OUTER = dict(epsabs=0.0, epsrel=1e-10, limit=200)
_SINGLE = dict(epsabs=1e-14, epsrel=1e-12, limit=400)

_SQRT_2_PI = math.sqrt(2.0 / math.pi)


def quadrature_double_es(dist: DistributionModel, p: float, kernel=None, *,
                         standard: bool = False, rtol: float = DOUBLE_RTOL) -> float:
    """Nested integral ``int_p^1 int_v^1 K(u, v) / (f(q(u)) f(q(v))) du dv``.

    The default kernel is ``K(u, v) = v (1 - u)``. Substituting ``u = F(x)`` and
    ``v = F(y)`` cancels both density factors, leaving a bounded integrand on
    ``q(p) < y < x < inf``. ``standard=True`` integrates in the unscaled law.

    Raises
    ------
    NumericError
        If the outer error estimate exceeds ``rtol`` relative to the result.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {p}")
    if standard:
        cdf, quantile = dist.standard_cdf, dist.standard_quantile
    else:
        cdf, quantile = dist.cdf, dist.quantile
    lower = quantile(p)

    if kernel is None:
        # symmetric laws: 1 - F(x) = F(-x), exact in the far tail
        def inner(y):
            return integrate.quad(lambda x: cdf(-x), y, np.inf, **_INNER)[0] * cdf(y)
    else:
        def inner(y):
            v = cdf(y)
            return integrate.quad(lambda x: kernel(cdf(x), v), y, np.inf, **_INNER_KERNEL)[0]

    val, err = integrate.quad(inner, lower, np.inf, **_OUTER)
    if not err <= rtol * abs(val) + 1e-300:
        raise NumericError(f"double ES integral at p={p} missed rtol {rtol}",
                           estimate=val, error_bound=err)
    return val


def _single(func, a, b=np.inf):
    if a >= b:
        return 0.0
    val, err = integrate.quad(func, a, b, **_SINGLE)
    if not err <= 1e-9:
        raise NumericError(f"quadrature on [{a}, {b}] missed tolerance", estimate=val,
                           error_bound=err)
    return val


def supported(dist: DistributionModel, kind: str, r: int) -> bool:
    if kind not in (VAR, ES_CHEN, EXPECTILE) or r not in (1, 2):
        return False
    if dist.is_gaussian:
        return True
    return dist.nu > (4 if r == 2 else 2)


def closed_form_procyclicality(dist: DistributionModel, risk: RiskMeasureSpec, r: int) -> float:
    """Evaluate the tabulated pro-cyclicality for ``(dist, risk, r)``.

    Raises
    ------
    CapabilityError
        For risk kinds, orders or degrees of freedom without a closed form; use
        :func:`procyc.asymptotics.procyclicality` instead.
    """
    if not supported(dist, risk.kind, r):
        raise CapabilityError(
            f"no closed form for {risk.kind} with r={r} under {dist.label()}; "
            "use asymptotics.procyclicality (generic quadrature) instead")
    if risk.kind == ES_CHEN:
        return _es_gaussian(risk.p, r) if dist.is_gaussian else _es_student(dist, risk.p, r)
    level = risk.p if risk.kind == VAR else kappa_inverse(risk.dist or dist, risk.p)
    if dist.is_gaussian:
        return _var_gaussian(level, r)
    return _var_student(dist, level, r)


def _var_gaussian(p: float, r: int) -> float:
    g = gaussian()
    z = g.quantile(p)
    phi = g.pdf(z)
    if r == 2:
        return -INV_SQRT2 * phi * abs(z) / math.sqrt(2.0 * p * (1.0 - p))
    num = abs(phi - min(p, 1.0 - p) * _SQRT_2_PI)
    return -INV_SQRT2 * num / (math.sqrt(p * (1.0 - p)) * math.sqrt(1.0 - 2.0 / math.pi))


def _var_student(dist: DistributionModel, p: float, r: int) -> float:
    nu = dist.nu
    q = dist.standard_quantile(p)
    f = dist.standard_pdf(q)
    bump = 1.0 + q * q / nu
    if r == 2:
        den = math.sqrt((nu - 1.0) / (nu - 4.0) * 2.0 * p * (1.0 - p))
        return -INV_SQRT2 * f * abs(q) * bump / den
    G = gamma_ratio(nu)
    num = abs(math.sqrt(nu * (nu - 2.0)) / (nu - 1.0) * f * bump
              - min(p, 1.0 - p) * math.sqrt((nu - 2.0) / math.pi) * G)
    den = math.sqrt(p * (1.0 - p)) * math.sqrt(1.0 - (nu - 2.0) / math.pi * G * G)
    return -INV_SQRT2 * num / den


def _es_gaussian(p: float, r: int) -> float:
    g = gaussian()
    z = g.quantile(p)
    dbl = quadrature_double_es(g, p)
    if r == 2:
        # int_p^1 Phi^-1(u) du with u = Phi(x)
        num = _single(lambda x: x * g.pdf(x), z)
        return -INV_SQRT2 * abs(num) / (2.0 * math.sqrt(dbl))
    # int_p^1 [1 - (1-u) sqrt(2/pi) / phi(Phi^-1(u))] du, sign-flipped below the median
    upper = _single(lambda x: g.pdf(x) - g.cdf(-x) * _SQRT_2_PI, max(z, 0.0))
    lower = _single(lambda x: g.cdf(x) * _SQRT_2_PI - g.pdf(x), z, 0.0)
    num = upper + lower
    return -INV_SQRT2 * abs(num) / (2.0 * math.sqrt((0.5 - 1.0 / math.pi) * dbl))


def _es_student(dist: DistributionModel, p: float, r: int) -> float:
    nu = dist.nu
    q = dist.standard_quantile(p)
    f = dist.standard_pdf
    dbl = quadrature_double_es(dist, p, standard=True)
    if r == 2:
        num = _single(lambda y: y * (1.0 + y * y / nu) * f(y), q)
        den = 2.0 * math.sqrt((nu - 1.0) / (nu - 4.0) * dbl)
        return -INV_SQRT2 * abs(num) / den
    G = gamma_ratio(nu)
    a = math.sqrt(nu) / (nu - 1.0)
    b = G / math.sqrt(math.pi)
    upper = _single(lambda y: a * (1.0 + y * y / nu) * f(y) - b * dist.standard_cdf(-y),
                    max(q, 0.0))
    lower = _single(lambda y: b * dist.standard_cdf(y) - a * (1.0 + y * y / nu) * f(y), q, 0.0)
    num = math.sqrt(nu - 2.0) * (upper + lower)
    den = math.sqrt(2.0 * dbl) * math.sqrt(1.0 - (nu - 2.0) / math.pi * G * G)
    return -INV_SQRT2 * abs(num) / den
