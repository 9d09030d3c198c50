"""The sample pro-cyclicality statistic.

For an anchor ``t`` the backward window is ``[t - n + 1, t]`` and the forward
window ``[t + h - n + 1, t + h]``. Each anchor contributes the pair
``(log |zeta_fwd / zeta_back|, m_back)`` of a risk estimate ratio and the
backward dispersion; the statistic is the Pearson correlation of the pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import special

from . import asymptotics
from .dist import DistributionModel, gaussian, student_t
from .errors import (DegenerateCorrelationError, DomainError, InputError,
                     InsufficientDataError, NumericError, ConfigError)
from .estimators import EXPECTILE, VAR, RiskMeasureSpec, abs_centred_moment
from .processes import DEFAULT_BURN_IN, GarchParams, extract_residuals, fit_garch11_qmle

DEFAULT_LEVELS = (0.95, 0.975, 0.99, 0.995)
DEFAULT_MODELS = (gaussian(),) + tuple(student_t(v) for v in (4, 5, 6, 7))
_CHUNK = 4096


@dataclass(frozen=True)
class WindowingPlan:
    """Window length ``window``, anchor step ``stride`` and look-forward ``horizon``.

    ``horizon`` defaults to ``window``, the smallest gap keeping the forward
    window disjoint from the backward one.
    """

    window: int
    stride: int
    horizon: int | None = None

    def __post_init__(self):
        if self.horizon is None:
            object.__setattr__(self, "horizon", self.window)
        for name in ("window", "stride", "horizon"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise InputError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def disjoint(self) -> bool:
        return self.horizon >= self.window

    def anchors(self, length: int) -> np.ndarray:
        """0-based anchors with both windows inside a series of ``length``."""
        return np.arange(self.window - 1, length - self.horizon, self.stride)

    def backward_indices(self, t: int) -> range:
        return range(t - self.window + 1, t + 1)

    def forward_indices(self, t: int) -> range:
        return range(t + self.horizon - self.window + 1, t + self.horizon + 1)


@dataclass(frozen=True)
class ProcyclicalityResult:
    """Sample correlation of the (log-ratio, dispersion) pairs.

    ``ci_low``/``ci_high`` hold the Fisher interval at ``level``; they are
    ``None`` below 4 pairs, where the interval is undefined.
    """

    correlation: float
    pair_count: int
    dropped: int
    ci_low: float | None
    ci_high: float | None
    level: float

    def as_dict(self) -> dict:
        return dict(correlation=self.correlation, pair_count=self.pair_count,
                    dropped=self.dropped, ci_low=self.ci_low, ci_high=self.ci_high,
                    level=self.level)


def fisher_ci(rho: float, n_pairs: int, level: float = 0.95):
    """Fisher-z interval ``tanh(atanh(rho) -/+ z_{(1+level)/2} / sqrt(n - 3))``."""
    if int(n_pairs) != n_pairs or n_pairs < 4:
        raise InputError(f"the Fisher interval needs at least 4 pairs, got {n_pairs}")
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")
    if not abs(rho) < 1.0:
        raise DomainError(f"the Fisher interval needs |rho| < 1, got {rho}")
    z = math.atanh(rho)
    h = float(special.ndtri(0.5 * (1.0 + level))) / math.sqrt(n_pairs - 3)
    edge = math.nextafter(1.0, 0.0)
    return max(math.tanh(z - h), -edge), min(math.tanh(z + h), edge)


def pearson(a, b) -> float:
    """Pearson correlation with correctly rounded sums (order independent).

    Raises
    ------
    DegenerateCorrelationError
        If either column is constant.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size
    da = a - math.fsum(a) / n
    db = b - math.fsum(b) / n
    saa = math.fsum(da * da)
    sbb = math.fsum(db * db)
    if saa == 0.0 or sbb == 0.0:
        which = "log-ratio" if saa == 0.0 else "dispersion"
        raise DegenerateCorrelationError(f"the {which} column is constant; correlation undefined")
    rho = math.fsum(da * db) / math.sqrt(saa * sbb)
    return max(-1.0, min(1.0, rho))


def window_statistics(series, risk: RiskMeasureSpec, r: int, window: int, ends,
                      *, dispersion: bool = True):
    """Risk estimates (and order-r dispersions) of windows ending at ``ends``."""
    x = np.asarray(series, dtype=float)
    ends = np.asarray(ends, dtype=np.intp)
    views = sliding_window_view(x, window)
    starts = ends - window + 1
    zeta = np.empty(ends.size)
    disp = np.empty(ends.size) if dispersion else None
    for lo in range(0, ends.size, _CHUNK):
        block = views[starts[lo:lo + _CHUNK]]
        zeta[lo:lo + _CHUNK] = risk.evaluate_sorted(np.sort(block, axis=-1))
        if dispersion:
            disp[lo:lo + _CHUNK] = abs_centred_moment(block, r)
    return zeta, disp


def _series(series, losses: bool) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise InputError("series must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise InputError("series contains NaN or infinite values")
    return -x if losses else x


def pairs_from_estimates(zeta_back, zeta_fwd, disp_back):
    """Drop zero estimates; return ``(log_ratio, dispersion, dropped)``."""
    keep = (zeta_back != 0.0) & (zeta_fwd != 0.0)
    lr = np.log(np.abs(zeta_fwd[keep] / zeta_back[keep]))
    return lr, disp_back[keep], int(keep.size - keep.sum())


def correlate_pairs(log_ratio, dispersion, dropped: int = 0,
                    level: float = 0.95) -> ProcyclicalityResult:
    n = int(np.size(log_ratio))
    if n < 3:
        raise InsufficientDataError(f"need at least 3 valid pairs, got {n} ({dropped} dropped)")
    rho = pearson(log_ratio, dispersion)
    lo = hi = None
    if n >= 4 and abs(rho) < 1.0:
        lo, hi = fisher_ci(rho, n, level)
    return ProcyclicalityResult(rho, n, dropped, lo, hi, level)


def measure(series, risk: RiskMeasureSpec, r: int, plan: WindowingPlan, *,
            losses: bool = False, level: float = 0.95) -> ProcyclicalityResult:
    """Sample pro-cyclicality of ``risk`` against the order-r dispersion.

    ``losses=True`` negates the input first, for series recorded as returns
    whose risk sits in the lower tail.

    Raises
    ------
    InsufficientDataError
        Fewer than 3 valid pairs.
    DegenerateCorrelationError
        A constant pair column.
    """
    if int(r) != r or r < 1:
        raise DomainError(f"dispersion order must be a positive integer, got {r}")
    x = _series(series, losses)
    anchors = plan.anchors(x.size)
    if anchors.size == 0:
        raise InsufficientDataError(f"series of length {x.size} holds no anchor for window "
                                    f"{plan.window} and horizon {plan.horizon}")
    zb, mb = window_statistics(x, risk, r, plan.window, anchors)
    zf, _ = window_statistics(x, risk, r, plan.window, anchors + plan.horizon, dispersion=False)
    return correlate_pairs(*pairs_from_estimates(zb, zf, mb), level=level)


# -- comparison against iid asymptotics ---------------------------------------------


@dataclass(frozen=True)
class Band:
    """iid asymptotic value under ``model`` and its Fisher band."""

    model: str
    asymptotic: float | None
    low: float | None
    high: float | None
    residual_inside: bool | None
    raw_inside: bool | None
    note: str | None = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class LevelComparison:
    p: float
    raw: ProcyclicalityResult | None
    residual: ProcyclicalityResult | None
    bands: tuple
    raw_error: str | None = None
    residual_error: str | None = None

    def band(self, model: str) -> Band:
        for b in self.bands:
            if b.model == model:
                return b
        raise KeyError(model)

    def as_dict(self) -> dict:
        return dict(p=self.p, raw=self.raw and self.raw.as_dict(),
                    residual=self.residual and self.residual.as_dict(),
                    raw_error=self.raw_error, residual_error=self.residual_error,
                    bands=[b.as_dict() for b in self.bands])


@dataclass(frozen=True)
class ResidualReport:
    params: GarchParams
    fitted: bool
    fit_warnings: tuple
    burn_in: int
    levels: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return dict(params=dict(omega=self.params.omega, alpha=self.params.alpha,
                                beta=self.params.beta),
                    fitted=self.fitted, fit_warnings=list(self.fit_warnings),
                    burn_in=self.burn_in, levels=[c.as_dict() for c in self.levels])


@lru_cache(maxsize=1024)
def _asymptotic(model: DistributionModel, risk: RiskMeasureSpec, r: int) -> float:
    return asymptotics.procyclicality(model, risk, r)


def risk_at(kind: str, p: float, *, k: int | None = None,
            model: DistributionModel | None = None) -> RiskMeasureSpec:
    """Risk spec of ``kind`` at level ``p``; expectiles default to a Gaussian kappa."""
    if kind == EXPECTILE and model is None:
        model = gaussian()
    return RiskMeasureSpec(kind, p, k=k, dist=model if kind == EXPECTILE else None)


def _try_measure(x, risk, r, plan, losses, level):
    try:
        return measure(x, risk, r, plan, losses=losses, level=level), None
    except (InsufficientDataError, DegenerateCorrelationError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def residual_pipeline(series, params: GarchParams | None = None, *, fit: bool = False,
                      risk_kind: str = VAR, r: int = 1, plan: WindowingPlan,
                      levels=DEFAULT_LEVELS, models=DEFAULT_MODELS,
                      burn_in: int = DEFAULT_BURN_IN, level: float = 0.95,
                      losses: bool = False, k: int | None = None,
                      expectile_model: DistributionModel | None = None) -> ResidualReport:
    """Compare pro-cyclicality of a series and of its GARCH(1,1) residuals.

    Residuals come from ``params``, or from a QMLE fit when ``fit=True``. Both
    the raw series and the residuals are measured over the same post-burn-in
    span. For every level and candidate iid model the asymptotic value, its
    Fisher band at the residual pair count, and in-band flags are attached.

    Raises
    ------
    ConfigError
        Neither parameters nor ``fit=True``.
    InsufficientDataError
        Series too short for the burn-in or for any window pair.
    """
    x = _series(series, False)
    warnings = ()
    if params is None:
        if not fit:
            raise ConfigError("residual analysis needs GARCH parameters or a fit request")
        res = fit_garch11_qmle(x)
        params, warnings = res.params, res.warnings
    resid = extract_residuals(x, params, burn_in)
    raw = x[burn_in:]
    if plan.anchors(resid.size).size < 3:
        raise InsufficientDataError(f"{resid.size} post-burn-in points give fewer than 3 "
                                    "window pairs")
    out = []
    for p in levels:
        risk = risk_at(risk_kind, float(p), k=k, model=expectile_model)
        raw_res, raw_err = _try_measure(raw, risk, r, plan, losses, level)
        res_res, res_err = _try_measure(resid, risk, r, plan, losses, level)
        n_pairs = res_res.pair_count if res_res else (raw_res.pair_count if raw_res else 0)
        bands = []
        for model in models:
            try:
                asym = _asymptotic(model, risk, int(r))
            except (DomainError, NumericError) as exc:
                bands.append(Band(model.label(), None, None, None, None, None, str(exc)))
                continue
            if n_pairs < 4:
                bands.append(Band(model.label(), asym, None, None, None, None,
                                  "fewer than 4 pairs"))
                continue
            lo, hi = fisher_ci(asym, n_pairs, level)
            bands.append(Band(model.label(), asym, lo, hi,
                              None if res_res is None else lo <= res_res.correlation <= hi,
                              None if raw_res is None else lo <= raw_res.correlation <= hi))
        out.append(LevelComparison(float(p), raw_res, res_res, tuple(bands), raw_err, res_err))
    return ResidualReport(params, fit, warnings, int(burn_in), tuple(out))
