import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from hybridasp.bayes import (
    SEL,
    EstimatorDomainError,
    LossSpec,
    Prior,
    bayes_estimate,
    estimator_moments,
    linex_estimate,
    posterior_pdf,
    sel_estimate,
)
from hybridasp.censoring import CensoringScheme, simulate_mle
from hybridasp.mle_dist import mle_moments

PRIOR = Prior(1.25, 2.5)


def test_sel_case_study():
    assert sel_estimate(27067 / 9, 9, PRIOR) == pytest.approx(2577.9286, abs=1e-3)


def test_linex_case_study():
    assert linex_estimate(31968 / 11, 11, PRIOR, 0.5) == pytest.approx(2883.2339, abs=1e-3)


def test_sel_substitution():
    assert sel_estimate(10.0, 2, Prior(1, 2)) == pytest.approx(7.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 1e4), st.integers(1, 50))
def test_sel_identity_prior(x, D):
    # a = 0, b = 1 leaves the MLE untouched
    assert sel_estimate(x, D, Prior(0, 1)) == pytest.approx(x, rel=1e-14)


def test_flat_prior_limit_is_not_identity():
    # a = b = 0 gives D*mle/(D-1), not the MLE
    assert sel_estimate(10.0, 5, Prior(0, 0)) == pytest.approx(12.5)
    with pytest.raises(EstimatorDomainError):
        sel_estimate(10.0, 1, Prior(0, 0))


def test_linex_small_c_limit():
    x, D = 37.0, 6
    expected = x - (x * (PRIOR.b - 1) - PRIOR.a) / D
    assert linex_estimate(x, D, PRIOR, 1e-8) == pytest.approx(expected, abs=1e-4)


def test_linex_substitution():
    assert linex_estimate(10.0, 5, Prior(0, 1), 1.0) == pytest.approx(10 - math.log(11), rel=1e-14)


def test_linex_domain():
    # log argument 1 + c/(2D)(c x^2 - 2a + 2x(b-1)) < 0
    with pytest.raises(EstimatorDomainError):
        linex_estimate(1.0, 1, Prior(100, 2.5), 1.0)
    out = linex_estimate(np.array([1.0, 50.0]), 1, Prior(100, 2.5), 1.0, strict=False)
    assert math.isnan(out[0]) and math.isfinite(out[1])
    with pytest.raises(ValueError):
        linex_estimate(1.0, 1, PRIOR, 0.0)


def test_loss_spec():
    assert str(SEL) == "SEL"
    assert str(LossSpec.linex(-0.5)) == "Linex(c=-0.5)"
    with pytest.raises(ValueError):
        LossSpec("linex")
    with pytest.raises(ValueError):
        LossSpec("sel", 0.5)
    with pytest.raises(ValueError):
        LossSpec("hinge")
    with pytest.raises(ValueError):
        Prior(-1, 1)
    assert bayes_estimate(10.0, 2, Prior(1, 2), SEL) == pytest.approx(7.0)


def test_posterior_shape():
    x, D = 2.0, 3
    f = lambda t: posterior_pdf(t, x, D, PRIOR)
    total = integrate.quad(f, 0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    assert total == pytest.approx(1, abs=1e-8)
    mean = integrate.quad(lambda t: t * f(t), 0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    assert mean == pytest.approx(sel_estimate(x, D, PRIOR), rel=1e-6)
    res = optimize.minimize_scalar(lambda t: -f(t), bounds=(0.01, 10), method="bounded",
                                   options={"xatol": 1e-10})
    assert res.x == pytest.approx(7.25 / 6.5, rel=1e-6)
    assert posterior_pdf(-1.0, x, D, PRIOR) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 1e3), st.floats(0.1, 1e3), st.integers(1, 40))
def test_estimates_monotone_in_mle(x1, x2, D):
    lo, hi = sorted((x1, x2))
    assert sel_estimate(lo, D, PRIOR) <= sel_estimate(hi, D, PRIOR)
    # Linex slope 1 - (cx + b - 1)/(D arg) is positive for every x once
    # D - 2.125 + x/4 + x^2/8 > 0 (c = 0.5, a = 1.25, b = 2.5), i.e. D >= 3
    if D >= 3:
        a, b = linex_estimate(np.array([lo, hi]), D, PRIOR, 0.5)
        assert a <= b + 1e-9


def test_linex_not_monotone_with_one_failure():
    assert linex_estimate(0.5, 1, PRIOR, 0.5) > linex_estimate(1.0, 1, PRIOR, 0.5)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 1e3), st.integers(1, 40), st.floats(0.05, 2.0))
def test_linex_sign_ordering_condition(x, D, c):
    # est(-c) >= est(c)  iff  4 D x^2 + c^2 x^4 >= k^2, k = 2x(b-1) - 2a
    lo = linex_estimate(x, D, PRIOR, c, strict=False)
    hi = linex_estimate(x, D, PRIOR, -c, strict=False)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return
    k = 2 * x * (PRIOR.b - 1) - 2 * PRIOR.a
    margin = 4 * D * x**2 + c**2 * x**4 - k**2
    if abs(margin) > 1e-6 * (k**2 + 1):
        assert (hi >= lo) == (margin > 0)


def test_linex_sign_ordering_can_fail_for_one_failure():
    assert linex_estimate(0.25, 1, PRIOR, -1.0) < linex_estimate(0.25, 1, PRIOR, 1.0)


def test_sel_moments_identity_case():
    s = CensoringScheme(8, 5, 1.3)
    m = mle_moments(s, 2.0)
    e = estimator_moments(s, 2.0, Prior(0, 1), SEL)
    assert e.mean == pytest.approx(m.mean, rel=1e-15)
    assert e.variance == pytest.approx(m.variance, rel=1e-15)


def test_sel_moment_factor():
    s = CensoringScheme(8, 5, 1.3)
    m = mle_moments(s, 2.0)
    e = estimator_moments(s, 2.0, PRIOR, SEL)
    assert e.mean == pytest.approx((5 * m.mean + 1.25) / 6.5)
    assert e.variance == pytest.approx((5 / 6.5) ** 2 * m.variance)
    e3 = estimator_moments(s, 2.0, PRIOR, SEL, d_convention=3)
    assert e3.variance == pytest.approx((3 / 4.5) ** 2 * m.variance)


def test_linex_moments_by_finite_difference():
    s = CensoringScheme(8, 5, 1.3)
    m = mle_moments(s, 2.0)
    e = estimator_moments(s, 2.0, PRIOR, LossSpec.linex(0.5))
    U = lambda x: linex_estimate(x, 5, PRIOR, 0.5)
    h = 1e-5
    slope = (U(m.mean + h) - U(m.mean - h)) / (2 * h)
    assert e.mean == pytest.approx(U(m.mean), rel=1e-14)
    assert e.variance == pytest.approx(slope**2 * m.variance, rel=1e-8)


def test_sel_mean_monte_carlo():
    s = CensoringScheme(31, 26, 100.0)
    draws, _ = simulate_mle(s, 200.0, 1_000_000, seed=9)
    est = sel_estimate(draws, 26, PRIOR)
    e = estimator_moments(s, 200.0, PRIOR, SEL, d_convention=26)
    assert abs(est.mean() - e.mean) <= 3 * est.std(ddof=1) / math.sqrt(est.size)


def test_linex_sign_ordering():
    s = CensoringScheme(31, 26, 100.0)
    plus = estimator_moments(s, 200.0, PRIOR, LossSpec.linex(0.5))
    minus = estimator_moments(s, 200.0, PRIOR, LossSpec.linex(-0.5))
    assert minus.mean > plus.mean


def test_moment_domain_errors():
    s = CensoringScheme(4, 2, 1.0)
    with pytest.raises(EstimatorDomainError):
        estimator_moments(s, 1.0, Prior(100, 2.5), LossSpec.linex(1.0))
    with pytest.raises(ValueError):
        estimator_moments(s, 1.0, PRIOR, SEL, d_convention=0)
