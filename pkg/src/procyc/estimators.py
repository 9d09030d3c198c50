"""Historical risk-measure and dispersion estimators.

All estimators act along the last axis, so a 2-D array is treated as a batch
of samples (one per row). Order statistics follow the ceiling convention
``q_n(p) = X_(ceil(n p))`` with no interpolation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import DistributionModel, kappa_inverse
from .errors import DomainError, InputError

VAR = "var"
ES_CHEN = "es_chen"
ES_AVG = "es_avg"
EXPECTILE = "expectile"
RISK_KINDS = (VAR, ES_CHEN, ES_AVG, EXPECTILE)

# absorbs binary representation error in n*p (e.g. 20 * 0.35 == 7.000000000000001)
_CEIL_SLACK = 1e-9


def as_sample(values) -> np.ndarray:
    """Validate and return a float array of samples (1-D, or 2-D batch)."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim > 2:
        raise InputError("samples must be 1-D or a 2-D batch of rows")
    if arr.shape[-1] < 1:
        raise InputError("empty sample")
    if not np.all(np.isfinite(arr)):
        raise InputError("sample contains NaN or infinite values")
    return arr


def _check_level(p):
    if not 0.0 < p < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {p}")


def order_index(n: int, p: float) -> int:
    """1-based index ``ceil(n p)`` clipped to ``[1, n]``."""
    return min(max(math.ceil(n * p - _CEIL_SLACK), 1), n)


def nearest_int(x: float) -> int:
    """Nearest integer ``[x]``; exact halves go to the even neighbour."""
    return int(round(x))


def sample_quantile(s, p: float, *, presorted: bool = False):
    """Empirical p-quantile ``X_(ceil(n p))``."""
    _check_level(p)
    x = as_sample(s)
    xs = x if presorted else np.sort(x, axis=-1)
    return _out(xs[..., order_index(xs.shape[-1], p) - 1])


def abs_centred_moment(s, r: int):
    """``(1/n) sum |X_i - mean|^r``; r=1 gives the MAD, r=2 the biased variance."""
    if int(r) != r or r < 1:
        raise DomainError(f"moment order must be a positive integer, got {r}")
    x = as_sample(s)
    dev = np.abs(x - x.mean(axis=-1, keepdims=True))
    if r == 1:
        return _out(dev.mean(axis=-1))
    if r == 2:
        return _out((dev * dev).mean(axis=-1))
    return _out((dev ** int(r)).mean(axis=-1))


def es_chen(s, p: float, *, presorted: bool = False, divisor: str = "count"):
    """Threshold-average ES: ``sum L_i 1(L_i >= q_n(p)) / d``.

    ``divisor="count"`` (default) takes ``d`` as the number of summed terms,
    so the result is the mean of the losses at or above the sample quantile;
    ties at the threshold are all kept. ``divisor="printed"`` uses the
    approximation ``d = n - [np] + 1`` with ``[.]`` the nearest integer. The two
    agree for distinct values whenever ``[np] == ceil(np)`` and otherwise differ
    by a constant factor at fixed ``(n, p)``.
    """
    _check_level(p)
    if divisor not in ("count", "printed"):
        raise DomainError(f"divisor must be 'count' or 'printed', got {divisor!r}")
    x = as_sample(s)
    xs = x if presorted else np.sort(x, axis=-1)
    n = xs.shape[-1]
    i = order_index(n, p)
    thr = xs[..., i - 1:i]
    above = xs >= thr
    total = np.where(above, xs, 0.0).sum(axis=-1)
    if divisor == "count":
        return _out(total / above.sum(axis=-1))
    return _out(total / (n - nearest_int(n * p) + 1))


def es_grid(p: float, k: int) -> np.ndarray:
    """Levels ``p_i = p + (i - 1)(1 - p)/k`` for i = 1..k."""
    _check_level(p)
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    return p + np.arange(int(k)) * (1.0 - p) / k


def es_avg_quantiles(s, p: float, k: int, *, presorted: bool = False):
    """Average of ``k`` sample quantiles on the grid :func:`es_grid`."""
    levels = es_grid(p, k)
    x = as_sample(s)
    xs = x if presorted else np.sort(x, axis=-1)
    n = xs.shape[-1]
    idx = np.array([order_index(n, float(pi)) - 1 for pi in levels])
    return _out(xs[..., idx].mean(axis=-1))


def expectile_estimate(s, p: float, dist: DistributionModel, *, presorted: bool = False):
    """Expectile through the quantile map: ``q_n(kappa^-1(p))`` under ``dist``."""
    return sample_quantile(s, kappa_inverse(dist, p), presorted=presorted)


@dataclass(frozen=True)
class RiskMeasureSpec:
    """Which risk estimator to use and at what level.

    ``k`` is only read for ``es_avg``; ``dist`` (the law used for kappa^-1)
    only for ``expectile``, where it is mandatory.
    """

    kind: str
    p: float
    k: int | None = None
    dist: DistributionModel | None = None
    _kinv: float | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in RISK_KINDS:
            raise DomainError(f"unknown risk measure {self.kind!r}; expected one of {RISK_KINDS}")
        _check_level(self.p)
        if self.kind == ES_AVG and (self.k is None or int(self.k) != self.k or self.k < 1):
            raise DomainError("es_avg needs a positive integer k")
        if self.kind == EXPECTILE:
            if self.dist is None:
                raise DomainError("the expectile estimator needs a model for kappa^-1")
            object.__setattr__(self, "_kinv", kappa_inverse(self.dist, self.p))

    @property
    def quantile_level(self) -> float:
        """Level of the underlying sample quantile (VaR and expectile only)."""
        if self.kind == VAR:
            return self.p
        if self.kind == EXPECTILE:
            return self._kinv
        raise DomainError(f"{self.kind} is not a single quantile")

    def label(self) -> str:
        if self.kind == ES_AVG:
            return f"es_avg{self.k}"
        return self.kind

    def evaluate_sorted(self, xs: np.ndarray):
        """Evaluate on already sorted rows, skipping validation."""
        if self.kind == VAR:
            return _out(xs[..., order_index(xs.shape[-1], self.p) - 1])
        if self.kind == EXPECTILE:
            return _out(xs[..., order_index(xs.shape[-1], self._kinv) - 1])
        if self.kind == ES_CHEN:
            return es_chen(xs, self.p, presorted=True)
        return es_avg_quantiles(xs, self.p, self.k, presorted=True)


def var(p: float) -> RiskMeasureSpec:
    return RiskMeasureSpec(VAR, p)


def evaluate(spec: RiskMeasureSpec, s):
    """Dispatch ``spec`` on sample ``s``."""
    return spec.evaluate_sorted(np.sort(as_sample(s), axis=-1))


def _out(a):
    return float(a) if np.ndim(a) == 0 else a
