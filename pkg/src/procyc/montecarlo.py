"""Monte Carlo over independent replications.

Replication ``i`` owns stream ``i`` of the base seed and contributes a single
disjoint-window pair, so pairs are iid across replications. Work is split in
fixed chunks whose results are reassembled in index order; the output is
therefore independent of the number of worker threads.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dist import DistributionModel
from .errors import InputError
from .estimators import RiskMeasureSpec, abs_centred_moment
from .procyclicality import ProcyclicalityResult, correlate_pairs, pairs_from_estimates, pearson
from .processes import GarchParams, SimulationPlan, draw_innovations, simulate_garch11_batch
from .rng import check_seed, stream

CHUNK = 500
GARCH_BURN_IN = 500


@dataclass(frozen=True)
class PairSample:
    """Per-replication backward/forward estimates."""

    zeta_back: np.ndarray
    zeta_fwd: np.ndarray
    disp_back: np.ndarray

    def procyclicality(self, level: float = 0.95) -> ProcyclicalityResult:
        """Correlation of ``log |zeta_fwd / zeta_back|`` with the backward dispersion."""
        return correlate_pairs(*pairs_from_estimates(self.zeta_back, self.zeta_fwd,
                                                     self.disp_back), level=level)

    def forward_correlation(self) -> float:
        """Correlation of the forward estimate with the backward dispersion."""
        return pearson(self.zeta_fwd, self.disp_back)


def _check(reps, n, horizon, threads):
    for name, v in (("reps", reps), ("n", n), ("horizon", horizon), ("threads", threads)):
        if isinstance(v, bool) or int(v) != v or v < 1:
            raise InputError(f"{name} must be a positive integer, got {v!r}")
    if horizon < n:
        raise InputError("horizon must be at least n for disjoint windows")


def _estimates(paths, risk, r, n, horizon):
    back = paths[:, :n]
    fwd = paths[:, horizon:horizon + n]
    return (risk.evaluate_sorted(np.sort(back, axis=-1)),
            risk.evaluate_sorted(np.sort(fwd, axis=-1)),
            abs_centred_moment(back, r))


def _run(make_paths, risk, r, n, horizon, reps, threads) -> PairSample:
    bounds = [(lo, min(lo + CHUNK, reps)) for lo in range(0, reps, CHUNK)]

    def work(b):
        return _estimates(make_paths(range(*b)), risk, r, n, horizon)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    return PairSample(*(np.concatenate([np.atleast_1d(p[j]) for p in parts]) for j in range(3)))


def iid_pairs(dist: DistributionModel, risk: RiskMeasureSpec, r: int, n: int, reps: int,
              seed: int, *, horizon: int | None = None, threads: int = 1) -> PairSample:
    """One backward/forward window pair per iid replication."""
    horizon = n if horizon is None else horizon
    _check(reps, n, horizon, threads)
    seed = check_seed(seed)
    m = horizon + n

    def make(indices):
        return np.stack([draw_innovations(dist, stream(seed, i), m) for i in indices])

    return _run(make, risk, r, n, horizon, reps, threads)


def garch_pairs(params: GarchParams, innovation: DistributionModel, risk: RiskMeasureSpec,
                r: int, n: int, reps: int, seed: int, *, horizon: int | None = None,
                burn_in: int = GARCH_BURN_IN, threads: int = 1) -> PairSample:
    """One window pair per independent stationary GARCH(1,1) path."""
    horizon = n if horizon is None else horizon
    _check(reps, n, horizon, threads)
    plan = SimulationPlan(horizon + n, burn_in, seed, innovation)
    return _run(lambda idx: simulate_garch11_batch(params, plan, idx), risk, r, n, horizon,
                reps, threads)


def correlation_standard_error(rho: float, n: int) -> float:
    """Large-sample standard error ``(1 - rho^2) / sqrt(n - 1)`` of a correlation."""
    return (1.0 - rho * rho) / np.sqrt(n - 1.0)
