import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from hybridasp.censoring import (
    CensoredSample,
    CensoringScheme,
    _mle_rows,
    censor,
    exponential_lifetimes,
    make_generator,
    mle,
    simulate_mle,
    simulate_sample,
)
from hybridasp.data import APPLIANCE_LIFETIMES


@pytest.mark.parametrize("seed", range(50))
def test_huge_T_never_binds(seed):
    s = simulate_sample(CensoringScheme(5, 3, 1e6), 1.0, seed)
    assert s.D == 3
    assert s.t_star == s.failures[-1]


@pytest.mark.parametrize("seed", range(20))
def test_tiny_T_leaves_no_failure(seed):
    T = 1e-300
    s = simulate_sample(CensoringScheme(5, 3, T), 1.0, seed)
    assert s.D == 0
    assert s.t_star == T


def test_no_failure_probability():
    # P(D = 0) = exp(-n T / theta)
    scheme = CensoringScheme(10, 5, 1.0)
    trials = 1_000_000
    _, D = simulate_mle(scheme, 1.0, trials, seed=11, conditional=False)
    p = math.exp(-10)
    se = math.sqrt(p * (1 - p) / trials)
    assert abs(np.mean(D == 0) - p) <= 3 * se


def test_case_study_mle():
    scheme = CensoringScheme(31, 9, 2000)
    s = censor(APPLIANCE_LIFETIMES[:31], scheme)
    assert s.D == 9
    assert s.t_star == 1062
    assert sum(s.failures) == 3703
    assert mle(s, scheme) == pytest.approx((3703 + 22 * 1062) / 9, rel=1e-15)
    assert mle(s, scheme) == pytest.approx(3007.4444444, abs=1e-6)


def test_single_unit():
    scheme = CensoringScheme(1, 1, 100)
    assert mle(censor([5.0], scheme), scheme) == 5.0


def test_no_failure_gives_nT():
    scheme = CensoringScheme(4, 2, 25)
    s = censor([30.0, 40.0, 50.0, 60.0], scheme)
    assert s.D == 0
    assert mle(s, scheme) == 100.0


def test_time_censored_case():
    scheme = CensoringScheme(5, 3, 2.0)
    s = censor([0.5, 1.5, 2.5, 3.0, 9.0], scheme)
    assert (s.D, s.t_star) == (2, 2.0)
    assert mle(s, scheme) == pytest.approx((0.5 + 1.5 + 3 * 2.0) / 2)


def test_deterministic_and_seed_sensitive():
    scheme = CensoringScheme(8, 4, 1.5)
    assert simulate_sample(scheme, 2.0, 7) == simulate_sample(scheme, 2.0, 7)
    assert simulate_sample(scheme, 2.0, 7) != simulate_sample(scheme, 2.0, 8)
    a = simulate_mle(scheme, 2.0, 1000, seed=3)
    b = simulate_mle(scheme, 2.0, 1000, seed=3)
    np.testing.assert_array_equal(a[0], b[0])


def test_improper_scheme_rejected():
    with pytest.raises(ValueError):
        simulate_sample(CensoringScheme(3, 3, 1.0), 1.0, 0)
    with pytest.raises(ValueError):
        CensoringScheme(3, 4, 1.0)
    with pytest.raises(ValueError):
        CensoringScheme(3, 2, 0.0)
    with pytest.raises(ValueError):
        simulate_sample(CensoringScheme(3, 2, 1.0), -1.0, 0)


def test_sample_validation():
    with pytest.raises(ValueError):
        CensoredSample((2.0, 1.0), 3.0)
    with pytest.raises(ValueError):
        CensoredSample((1.0, 4.0), 3.0)
    with pytest.raises(ValueError):
        mle(CensoredSample((1.0, 2.0, 2.5), 3.0), CensoringScheme(5, 2, 3.0))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_uniformity_chi_square(seed):
    # F(X) of exponential lifetimes should be uniform
    rng = make_generator(seed)
    u = -np.expm1(-exponential_lifetimes(rng, 3.0, 200_000) / 3.0)
    counts, _ = np.histogram(u, bins=50, range=(0, 1))
    assert stats.chisquare(counts).pvalue > 1e-3


def test_ties_broken_by_index():
    scheme = CensoringScheme(4, 2, 10.0)
    s = censor([1.0, 1.0, 3.0, 1.0], scheme)
    assert s.failures == (1.0, 1.0)
    assert mle(s, scheme) == pytest.approx((2.0 + 2 * 1.0) / 2)


lifetimes = st.lists(st.floats(0.001, 50.0), min_size=2, max_size=12)


@settings(max_examples=200, deadline=None)
@given(lifetimes, st.data(), st.floats(0.01, 60.0))
def test_mle_positive_and_matches_rows(x, data, T):
    n = len(x)
    gamma = data.draw(st.integers(1, n - 1))
    scheme = CensoringScheme(n, gamma, T)
    value = mle(censor(x, scheme), scheme)
    assert value > 0
    est, D = _mle_rows(np.sort(np.asarray(x))[None, :], scheme)
    assert est[0] == pytest.approx(value, rel=1e-12)
    assert D[0] == censor(x, scheme).D


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.001, 1.0), min_size=3, max_size=3), st.lists(st.floats(1.0, 100.0), min_size=3, max_size=3))
def test_invariant_beyond_gamma(head, tail):
    # D = gamma: lifetimes past the gamma-th failure do not enter
    scheme = CensoringScheme(6, 3, 5.0)
    base = mle(censor(head + [2.0, 2.0, 2.0], scheme), scheme)
    moved = mle(censor(head + tail, scheme), scheme)
    assert moved == pytest.approx(base, rel=1e-12)
