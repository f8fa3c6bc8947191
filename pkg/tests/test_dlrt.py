import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdmt.datagen import CovarianceSpec, make_rng, sample_mvn
from hdmt.dlrt import (
    TestResult,
    dlrt_components,
    dlrt_one_sample,
    dlrt_two_sample,
    t_stats_one_sample,
    t_stats_two_sample,
    theoretical_power,
    upper_tail_p,
)
from hdmt.errors import DegenerateVarianceError, DimensionError, DomainError
from hdmt.specfun import null_moments, xi_k

from oracles import neg2_log_lambda_one_sample, neg2_log_lambda_two_sample

Z95 = 1.6448536269514722


def test_t_centered_column_is_zero():
    assert t_stats_one_sample([[1.0], [2.0], [3.0]], [2.0])[0] == 0.0


def test_t_one_sample_hand_value():
    # xbar = 2, s^2 = 4, t = sqrt(3) * 2 / 2
    t = t_stats_one_sample(np.array([[0.0], [2.0], [4.0]]), [0.0])
    assert t[0] == pytest.approx(math.sqrt(3), rel=1e-14)


def test_constant_column_names_coordinate():
    x = np.array([[1.0, 0.1, 5.0], [2.0, 0.1, 6.0], [4.0, 0.1, 9.0]])
    with pytest.raises(DegenerateVarianceError) as exc:
        t_stats_one_sample(x, 0.0)
    assert exc.value.coordinate == 1
    assert "coordinate 1" in str(exc.value)


def test_t_two_sample_equal_means():
    x = np.array([[1.0], [2.0], [3.0]])
    assert t_stats_two_sample(x, x.copy())[0] == 0.0


def test_t_two_sample_hand_value():
    # diff -2, pooled variance 2, sqrt(n1 n2 / N) = 1
    t = t_stats_two_sample([[0.0], [2.0]], [[2.0], [4.0]])
    assert t[0] == pytest.approx(-math.sqrt(2), rel=1e-14)


def test_two_sample_dimension_mismatch():
    with pytest.raises(DimensionError):
        t_stats_two_sample(np.ones((3, 2)) + np.arange(3)[:, None], np.ones((3, 3)))


def test_two_sample_degenerate_pooled_variance():
    x = np.array([[1.0, 1.0], [2.0, 1.0]])
    y = np.array([[0.0, 3.0], [5.0, 3.0]])
    with pytest.raises(DegenerateVarianceError) as exc:
        t_stats_two_sample(x, y)
    assert exc.value.coordinate == 1


def test_components_zero_and_hand_value():
    comp = dlrt_components(np.zeros(4), 5, 4)
    assert comp.total == 0.0
    one = dlrt_components([math.sqrt(3)], 3, 2)
    assert one.values[0] == pytest.approx(3 * math.log(2.5), rel=1e-14)
    assert one.values[0] == pytest.approx(2.748872, abs=1e-6)


@pytest.mark.parametrize("seed", range(20))
def test_one_sample_equals_likelihood_ratio_product(seed):
    rng = make_rng((77, seed))
    n, p = rng.integers(2, 11), rng.integers(1, 51)
    x = rng.normal(size=(n, p)) * rng.uniform(0.1, 5, size=p) + rng.normal(size=p)
    mu0 = rng.normal(size=p)
    t1 = dlrt_components(t_stats_one_sample(x, mu0), n, n - 1).total
    assert t1 == pytest.approx(neg2_log_lambda_one_sample(x, mu0), rel=1e-10)


@pytest.mark.parametrize("seed", range(20))
def test_two_sample_equals_likelihood_ratio_product(seed):
    rng = make_rng((78, seed))
    n1, n2, p = rng.integers(2, 11), rng.integers(2, 11), rng.integers(1, 51)
    x = rng.normal(size=(n1, p))
    y = rng.normal(size=(n2, p)) + 0.5
    t2 = dlrt_two_sample(x, y, lag_h=0).statistic_raw
    assert t2 == pytest.approx(neg2_log_lambda_two_sample(x, y), rel=1e-10)


def test_mean_equal_to_mu0_gives_zero_statistic():
    x = make_rng(5).normal(size=(6, 40))
    res = dlrt_one_sample(x, x.mean(axis=0))
    assert res.statistic_raw == pytest.approx(0.0, abs=1e-20)
    assert res.statistic_std < 0
    assert res.p_value > 0.5


def test_identical_samples_give_zero():
    x = make_rng(6).normal(size=(5, 30))
    assert dlrt_two_sample(x, x.copy()).statistic_raw == 0.0


def test_result_fields_consistent():
    x = make_rng(7).normal(size=(8, 100))
    y = make_rng(8).normal(size=(7, 100))
    res = dlrt_two_sample(x, y)
    assert isinstance(res, TestResult)
    assert res.n_scale == 15 and res.nu == 13 and res.p == 100 and res.lag_h == 5
    assert res.centering == "exact_m1"
    mom = null_moments(15, 13)
    assert res.statistic_std == pytest.approx((res.statistic_raw - 100 * mom.m1) / math.sqrt(100 * res.tau_sq_hat))
    assert res.p_value == pytest.approx(1 - 0.5 * (1 + math.erf(res.statistic_std / math.sqrt(2))), abs=1e-15)


def test_expansion_centering():
    x = make_rng(9).normal(size=(12, 80))
    res = dlrt_one_sample(x, 0.0, centering="expansion", k=3)
    assert res.centering == "expansion_xi_k" and res.k == 3
    assert res.tau_sq_hat == 2.0
    expected = (res.statistic_raw - 80 * xi_k(12, 11, 3)) / math.sqrt(160)
    assert res.statistic_std == pytest.approx(expected, rel=1e-12)


def test_expansion_needs_enough_df():
    x = make_rng(10).normal(size=(5, 20))
    with pytest.raises(DomainError):
        dlrt_one_sample(x, 0.0, centering="expansion", k=3)


def test_unknown_centering():
    with pytest.raises(DomainError):
        dlrt_one_sample(make_rng(1).normal(size=(4, 10)), 0.0, centering="bogus")


def test_each_group_needs_two_rows():
    with pytest.raises(DimensionError, match="at least 2"):
        dlrt_two_sample([[0.0], [1.0]], [[0.5]])


finite = st.floats(-100, 100, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), finite)
def test_shift_invariance(seed, c):
    rng = make_rng(seed)
    x = rng.normal(size=(5, 25)) * 3
    y = rng.normal(size=(6, 25))
    mu0 = rng.normal(size=25)
    a = dlrt_one_sample(x, mu0)
    b = dlrt_one_sample(x + c, mu0 + c)
    assert b.statistic_raw == pytest.approx(a.statistic_raw, rel=1e-10, abs=1e-10)
    a2 = dlrt_two_sample(x, y)
    b2 = dlrt_two_sample(x + c, y + c)
    assert b2.statistic_raw == pytest.approx(a2.statistic_raw, rel=1e-10, abs=1e-10)
    assert b2.statistic_std == pytest.approx(a2.statistic_std, rel=1e-9, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), st.lists(st.floats(0.01, 100), min_size=25, max_size=25), st.lists(st.booleans(), min_size=25, max_size=25))
def test_diagonal_scale_invariance(seed, scales, flips):
    d = np.array(scales) * np.where(flips, -1.0, 1.0)
    rng = make_rng(seed)
    x = rng.normal(size=(5, 25))
    y = rng.normal(size=(4, 25)) + 0.3
    mu0 = rng.normal(size=25)
    assert dlrt_two_sample(x * d, y * d).statistic_raw == pytest.approx(
        dlrt_two_sample(x, y).statistic_raw, rel=1e-10
    )
    assert dlrt_one_sample(x * d, mu0 * d).statistic_raw == pytest.approx(
        dlrt_one_sample(x, mu0).statistic_raw, rel=1e-10
    )


def test_not_orthogonally_invariant():
    rng = make_rng(21)
    x = rng.normal(size=(5, 10))
    y = rng.normal(size=(5, 10)) + np.linspace(0, 2, 10)
    q, _ = np.linalg.qr(rng.normal(size=(10, 10)))
    before = dlrt_two_sample(x, y).statistic_raw
    after = dlrt_two_sample(x @ q.T, y @ q.T).statistic_raw
    assert abs(after - before) > 1e-3 * before


# |t| >= 1e-100 keeps t^2 / nu clear of underflow
t_values = st.one_of(st.just(0.0), st.floats(1e-100, 1e6), st.floats(-1e6, -1e-100))


@given(st.lists(t_values, min_size=1, max_size=30), st.integers(2, 50))
def test_statistic_nonnegative_and_zero_iff_t_zero(ts, n):
    comp = dlrt_components(ts, n, n - 1)
    assert comp.total >= 0
    assert (comp.total == 0) == all(t == 0 for t in ts)


def test_small_statistic_approximation():
    p = 10
    gaps = {}
    for n in (200, 800):
        vals = []
        for r in range(100):
            x = make_rng((31, n, r)).normal(size=(n, p))
            t = t_stats_one_sample(x, 0.0)
            vals.append(abs(dlrt_components(t, n, n - 1).total - np.sum(t**2)))
        gaps[n] = np.array(vals)
    # |T1 - sum t^2| <= C p / n with C fixed empirically
    C = np.max(gaps[200]) / (p / 200)
    assert C < 20
    assert np.max(gaps[800]) <= C * p / 800 * 2
    assert gaps[800].mean() < gaps[200].mean() / 2


@pytest.mark.slow
def test_one_sample_null_moments_of_standardized_statistic():
    n, p = 5, 2000
    spec = CovarianceSpec(p=p)
    z = []
    for r in range(2000):
        x = sample_mvn(0.0, spec, n, seed=(41, r))
        z.append(dlrt_one_sample(x, np.zeros(p)).statistic_std)
    z = np.array(z)
    assert -0.1 <= z.mean() <= 0.1
    assert 0.85 <= z.var() <= 1.15


def test_power_examples():
    assert theoretical_power(0.0, 100, 2.0, 0.05) == pytest.approx(0.05, rel=1e-12)
    tau2, p = 2.3, 400
    at_half = Z95 * math.sqrt(tau2) * math.sqrt(p)
    assert theoretical_power(at_half, p, tau2, 0.05) == pytest.approx(0.5, abs=1e-12)
    assert theoretical_power(1e6, p, tau2, 0.05) == pytest.approx(1.0, abs=1e-12)
    assert theoretical_power(math.inf, p, tau2, 0.05) == 1.0


@given(st.floats(0, 1e4), st.floats(0, 1e4), st.integers(1, 5000), st.floats(0.1, 10), st.floats(0.001, 0.5))
def test_power_monotone(a, b, p, tau2, alpha):
    lo, hi = min(a, b), max(a, b)
    assert theoretical_power(lo, p, tau2, alpha) <= theoretical_power(hi, p, tau2, alpha)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
def test_power_alpha_domain(alpha):
    with pytest.raises(DomainError):
        theoretical_power(1.0, 10, 2.0, alpha)


def test_upper_tail_p_symmetry():
    assert upper_tail_p(0.0) == 0.5
    assert upper_tail_p(Z95) == pytest.approx(0.05, rel=1e-12)
