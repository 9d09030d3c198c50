import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from procyc.dist import gaussian, kappa_inverse, student_t
from procyc.errors import DomainError, InputError
from procyc.estimators import (ES_AVG, ES_CHEN, EXPECTILE, VAR, RiskMeasureSpec,
                               abs_centred_moment, es_avg_quantiles, es_chen, es_grid, evaluate,
                               expectile_estimate, nearest_int, order_index, sample_quantile)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
samples = arrays(np.float64, st.integers(1, 60), elements=finite)
levels = st.floats(0.01, 0.99)


def test_sample_quantile_examples():
    assert sample_quantile([1, 2, 3, 4], 0.5) == 2
    assert sample_quantile([5, 1, 4, 2, 3], 0.95) == 5
    for p in (0.01, 0.5, 0.99):
        assert sample_quantile([3.25], p) == 3.25


def test_order_index_absorbs_binary_noise():
    assert order_index(20, 0.35) == 7
    assert order_index(100, 0.95) == 95
    assert order_index(10, 0.001) == 1


def test_rounding_rule_half_to_even():
    assert nearest_int(2.5) == 2
    assert nearest_int(3.5) == 4
    assert nearest_int(4.0) == 4


def test_empty_and_nonfinite_rejected():
    with pytest.raises(InputError):
        sample_quantile([], 0.5)
    with pytest.raises(InputError):
        es_chen([1.0, np.nan], 0.5)
    with pytest.raises(InputError):
        abs_centred_moment([1.0, np.inf], 1)


def test_abs_centred_moment_examples():
    assert abs_centred_moment([1, 2, 3], 2) == pytest.approx(2 / 3, abs=1e-15)
    assert abs_centred_moment([1, 2, 3], 1) == pytest.approx(2 / 3, abs=1e-15)
    for r in (1, 2, 3):
        assert abs_centred_moment([4.2, 4.2, 4.2], r) == 0.0
    with pytest.raises(DomainError):
        abs_centred_moment([1, 2], 0)


def test_es_chen_examples():
    for divisor in ("count", "printed"):
        assert es_chen([1, 2, 3, 4], 0.5, divisor=divisor) == 3
        assert es_chen([1, 2, 3, 4, 5], 0.8, divisor=divisor) == 4.5
    for p in (0.1, 0.3, 0.5, 0.975):
        assert es_chen([2.5] * 8, p) == 2.5


def test_es_chen_divisors():
    x = np.arange(1.0, 253.0)
    # n p = 239.4: 13 terms at or above X_(240), printed divisor 252 - 239 + 1 = 14
    assert es_chen(x, 0.95) == x[239:].mean()
    assert es_chen(x, 0.95, divisor="printed") == x[239:].sum() / 14
    with pytest.raises(DomainError):
        es_chen(x, 0.95, divisor="other")


def test_es_grid_matches_four_point_scheme():
    p = 0.95
    ref = [0.25 * p * (5 - i) + 0.25 * (i - 1) for i in range(1, 5)]
    assert np.allclose(es_grid(p, 4), ref, atol=1e-15)
    assert np.allclose(es_grid(p, 4), [0.95, 0.9625, 0.975, 0.9875], atol=1e-15)


def test_es_avg_examples():
    s = np.arange(1.0, 101.0)
    np.random.default_rng(0).shuffle(s)
    assert es_avg_quantiles(s, 0.9, 2) == 92.5
    rng = np.random.default_rng(1)
    x = rng.standard_normal(37)
    for p in (0.1, 0.5, 0.9):
        assert es_avg_quantiles(x, p, 1) == sample_quantile(x, p)


def test_es_avg_top_order_statistics():
    # k = n - ceil(np) + 1 on a grid landing on the top order statistics
    n, p = 20, 0.8
    x = np.random.default_rng(2).permutation(np.arange(n) * 1.5 + 3.0)
    k = n - math.ceil(n * p) + 1
    assert es_avg_quantiles(x, p, k) == pytest.approx(np.sort(x)[-k:].mean(), rel=1e-15)


def test_expectile_examples():
    x = np.random.default_rng(3).standard_normal(101)
    assert expectile_estimate(x, 0.5, gaussian()) == np.sort(x)[math.ceil(101 / 2) - 1]
    assert expectile_estimate(x, 0.98761, gaussian()) == sample_quantile(x, 0.95)
    for p in (0.2, 0.9, 0.99):
        assert expectile_estimate(x, p, student_t(5)) == sample_quantile(
            x, kappa_inverse(student_t(5), p))


def test_evaluate_dispatch():
    s = [1, 2, 3, 4]
    assert evaluate(RiskMeasureSpec(VAR, 0.5), s) == 2
    assert evaluate(RiskMeasureSpec(ES_CHEN, 0.5), s) == 3
    x = np.random.default_rng(4).standard_normal(50)
    for p in (0.3, 0.95):
        assert evaluate(RiskMeasureSpec(ES_AVG, p, k=1), x) == evaluate(RiskMeasureSpec(VAR, p), x)


def test_spec_validation():
    with pytest.raises(DomainError):
        RiskMeasureSpec("cvar", 0.9)
    with pytest.raises(DomainError):
        RiskMeasureSpec(ES_AVG, 0.9)
    with pytest.raises(DomainError):
        RiskMeasureSpec(EXPECTILE, 0.9)
    with pytest.raises(DomainError):
        RiskMeasureSpec(VAR, 1.0)
    assert RiskMeasureSpec(ES_AVG, 0.9, k=4).label() == "es_avg4"


def test_batch_rows_match_single_evaluation():
    x = np.random.default_rng(5).standard_normal((6, 40))
    for spec in (RiskMeasureSpec(VAR, 0.9), RiskMeasureSpec(ES_CHEN, 0.9),
                 RiskMeasureSpec(ES_AVG, 0.9, k=3), RiskMeasureSpec(EXPECTILE, 0.9, dist=gaussian())):
        batch = evaluate(spec, x)
        assert np.array_equal(batch, [evaluate(spec, row) for row in x])
    assert np.array_equal(abs_centred_moment(x, 1), [abs_centred_moment(row, 1) for row in x])


SPECS = [RiskMeasureSpec(VAR, 0.9), RiskMeasureSpec(ES_CHEN, 0.8), RiskMeasureSpec(ES_AVG, 0.7, k=4),
         RiskMeasureSpec(EXPECTILE, 0.95, dist=gaussian())]


@settings(max_examples=100, deadline=None)
@given(s=samples, seed=st.integers(0, 2 ** 32 - 1))
def test_permutation_invariance(s, seed):
    perm = np.random.default_rng(seed).permutation(s)
    for spec in SPECS:
        assert evaluate(spec, perm) == evaluate(spec, s)
    for r in (1, 2):
        assert abs_centred_moment(perm, r) == pytest.approx(abs_centred_moment(s, r), rel=1e-9,
                                                            abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(s=samples, p=levels)
def test_es_chen_at_least_quantile(s, p):
    q = sample_quantile(s, p)
    assert es_chen(s, p) >= q - 1e-12 * (1 + abs(q))


@settings(max_examples=100, deadline=None)
@given(s=arrays(np.float64, st.integers(1, 40), elements=st.integers(-1000, 1000).map(float)),
       c=st.integers(-500, 500).map(float), lam=st.sampled_from([0.25, 0.5, 2.0, 8.0]))
def test_translation_and_scaling(s, c, lam):
    # integer-valued data and dyadic factors keep every operation exact
    for spec in (SPECS[0], SPECS[2], SPECS[3]):
        assert evaluate(spec, s + c) == evaluate(spec, s) + c
        assert evaluate(spec, lam * s) == lam * evaluate(spec, s)
    assert es_chen(lam * s, 0.8) == pytest.approx(lam * es_chen(s, 0.8), rel=1e-12, abs=1e-12)
    assert es_chen(s + c, 0.8) == pytest.approx(es_chen(s, 0.8) + c, rel=1e-12, abs=1e-9)
    for r in (1, 2):
        assert abs_centred_moment(s + c, r) == pytest.approx(abs_centred_moment(s, r), rel=1e-9,
                                                             abs=1e-9)
        assert abs_centred_moment(lam * s, r) == pytest.approx(lam ** r * abs_centred_moment(s, r),
                                                               rel=1e-12, abs=1e-12)
