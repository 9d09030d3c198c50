"""Gaussian and variance-normalized Student-t laws, and the quantile/expectile map.

Every public surface speaks in the normalized coordinate: both models have mean 0
and variance 1. A Student-t(nu) variable is scaled by ``sqrt((nu - 2) / nu)``.
The unscaled law is still reachable through the ``standard_*`` methods because
the Student closed forms are written in it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, NumericError

GAUSSIAN = "gaussian"
STUDENT = "student"

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class DistributionModel:
    """A parent law with mean 0 and variance 1.

    Parameters
    ----------
    kind : {"gaussian", "student"}
    nu : float, optional
        Degrees of freedom, Student-t only. Must exceed 2.
    """

    kind: str = GAUSSIAN
    nu: float | None = None

    def __post_init__(self):
        if self.kind == GAUSSIAN:
            if self.nu is not None:
                raise DomainError("a Gaussian model takes no degrees of freedom")
        elif self.kind == STUDENT:
            if self.nu is None or not math.isfinite(self.nu) or self.nu <= 2:
                raise DomainError(f"Student-t needs nu > 2 for unit variance, got {self.nu}")
            object.__setattr__(self, "nu", float(self.nu))
        else:
            raise DomainError(f"unknown distribution kind {self.kind!r}")

    @property
    def is_gaussian(self) -> bool:
        return self.kind == GAUSSIAN

    @property
    def symmetric(self) -> bool:
        return True

    @property
    def mean(self) -> float:
        return 0.0

    @property
    def scale(self) -> float:
        """Factor turning the standard law into the unit-variance one."""
        if self.is_gaussian:
            return 1.0
        return math.sqrt((self.nu - 2.0) / self.nu)

    @property
    def tag(self) -> str:
        return self.kind

    def label(self) -> str:
        return "gaussian" if self.is_gaussian else f"student(nu={self.nu:g})"

    def has_moment(self, order: int) -> bool:
        """True when E|X|^order is finite."""
        return self.is_gaussian or self.nu > order

    # -- standard (unscaled) law ------------------------------------------------

    def standard_pdf(self, y):
        y = np.asarray(y, dtype=float)
        if self.is_gaussian:
            out = np.exp(-0.5 * y * y) / _SQRT_2PI
        else:
            nu = self.nu
            norm = special.poch(0.5 * nu, 0.5) / math.sqrt(nu * math.pi)
            out = norm * np.exp(-0.5 * (nu + 1.0) * np.log1p(y * y / nu))
        return out if out.ndim else float(out)

    def standard_cdf(self, y):
        y = np.asarray(y, dtype=float)
        out = special.ndtr(y) if self.is_gaussian else special.stdtr(self.nu, y)
        return out if out.ndim else float(out)

    def standard_quantile(self, p):
        p = _check_level(p)
        if self.is_gaussian:
            out = special.ndtri(p)
        else:
            out = special.stdtrit(self.nu, p)
            # stdtrit alone is good to ~1e-11; two Newton steps reach round-off
            for _ in range(2):
                out = out - (special.stdtr(self.nu, out) - p) / self.standard_pdf(out)
        return out if np.ndim(out) else float(out)

    # -- normalized law -----------------------------------------------------------

    def pdf(self, x):
        s = self.scale
        out = self.standard_pdf(np.asarray(x, dtype=float) / s) / s
        return out

    def cdf(self, x):
        return self.standard_cdf(np.asarray(x, dtype=float) / self.scale)

    def quantile(self, p):
        return self.scale * self.standard_quantile(p)

    def truncated_first_moment(self, q):
        """Return the integral of ``x dF(x)`` over ``(-inf, q]``."""
        if self.is_gaussian:
            return -self.standard_pdf(q)
        s = self.scale
        y = np.asarray(q, dtype=float) / s
        # standard t: int_{-inf}^{y} t f(t) dt = -(nu / (nu - 1)) f(y) (1 + y^2 / nu)
        nu = self.nu
        out = -s * (nu / (nu - 1.0)) * self.standard_pdf(y) * (1.0 + y * y / nu)
        return out if np.ndim(out) else float(out)

    def abs_moment(self, order: int) -> float:
        """E|X|^order for the normalized law (closed form)."""
        if not self.has_moment(order):
            raise DomainError(f"{self.label()} has no finite moment of order {order}")
        a = float(order)
        if self.is_gaussian:
            return 2 ** (a / 2) * math.gamma((a + 1) / 2) / math.sqrt(math.pi)
        nu = self.nu
        std = nu ** (a / 2) * math.gamma((a + 1) / 2) / math.sqrt(math.pi) \
            * special.poch(nu / 2, -a / 2)
        return float(self.scale ** a * std)


def gaussian() -> DistributionModel:
    return DistributionModel(GAUSSIAN)


def student_t(nu: float) -> DistributionModel:
    return DistributionModel(STUDENT, nu)


def from_tag(kind: str, nu: float | None = None) -> DistributionModel:
    kind = kind.lower()
    if kind in ("gaussian", "normal", "norm"):
        return gaussian()
    if kind in ("student", "student-t", "t"):
        return student_t(nu)
    raise DomainError(f"unknown distribution {kind!r}")


def gamma_ratio(nu: float) -> float:
    """Gamma((nu - 1)/2) / Gamma(nu/2), stable for very large ``nu``."""
    return float(special.poch(0.5 * nu, -0.5))


def _check_level(p):
    arr = np.asarray(p, dtype=float)
    if np.any(~(arr > 0.0)) or np.any(~(arr < 1.0)):
        raise DomainError(f"level must lie strictly inside (0, 1), got {p}")
    return arr


def kappa(dist: DistributionModel, p: float) -> float:
    """Expectile level whose expectile equals the p-quantile.

    ``kappa(p) = (p q - T(q)) / (E[X] - 2 T(q) - (1 - 2p) q)`` with ``q`` the
    p-quantile and ``T(q)`` the truncated first moment up to ``q``.
    """
    _check_level(p)
    p = float(p)
    q = dist.quantile(p)
    tm = dist.truncated_first_moment(q)
    return (p * q - tm) / (dist.mean - 2.0 * tm - (1.0 - 2.0 * p) * q)


_BRACKET = (1e-12, 1.0 - 1e-12)


def kappa_inverse(dist: DistributionModel, p: float, *, tol: float = 1e-10,
                  max_iter: int = 200) -> float:
    """Quantile level ``a`` with ``kappa(a) == p``, found by bisection.

    Raises
    ------
    NumericError
        If the residual is still above ``tol`` after ``max_iter`` halvings.
    """
    _check_level(p)
    p = float(p)
    lo, hi = _BRACKET
    k_lo, k_hi = kappa(dist, lo), kappa(dist, hi)
    if not k_lo <= p <= k_hi:
        raise NumericError(f"kappa^-1({p}) lies outside the bracket "
                           f"[{k_lo:.3g}, {k_hi:.3g}]")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        k_mid = kappa(dist, mid)
        if k_mid == p:
            return mid
        if k_mid < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15:
            break
    resid = abs(kappa(dist, mid) - p)
    if resid > tol:
        raise NumericError(f"kappa inverse did not converge for p={p}",
                           estimate=mid, error_bound=resid)
    return mid
