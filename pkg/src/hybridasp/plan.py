"""Plan probabilities, long-run risks and the expected testing cost.

A plan draws a sample, computes the Bayes estimate and accepts when it is
at least ``t2``, rejects when it is below ``t1`` and otherwise draws again.
Under the normal approximation each draw accepts, rejects or continues with
probabilities ``p_a``, ``p_r``, ``p_c``; the long-run decision probabilities
are ``P_a = p_a/(1-p_c)`` and ``P_r = p_r/(1-p_c)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .bayes import SEL, EstimatorMoments, LossSpec, Prior, estimator_moments
from .censoring import CensoringScheme
from .mle_dist import DEFAULT_PREC

__all__ = [
    "PlanSpec",
    "PlanProbabilities",
    "normal_cdf",
    "plan_probabilities",
    "long_run_risks",
    "expected_testing_cost",
    "evaluate_plan",
    "PlanEvaluation",
]


@dataclass(frozen=True)
class PlanSpec:
    """Quality levels, risks, unit-time cost and the estimator used.

    ``theta_A`` (AQL) must not be below ``theta_U`` (UQL).
    """

    theta_A: float
    theta_U: float
    T: float
    alpha: float
    beta: float
    C: float = 1.0
    prior: Prior = field(default_factory=Prior)
    loss: LossSpec = SEL

    def __post_init__(self):
        if not (self.theta_A > 0 and self.theta_U > 0 and self.T > 0 and self.C > 0):
            raise ValueError("theta_A, theta_U, T and C must be positive")
        if self.theta_A < self.theta_U:
            raise ValueError(f"theta_A={self.theta_A} must be >= theta_U={self.theta_U}")
        if not (0 < self.alpha < 1 and 0 < self.beta < 1):
            raise ValueError("alpha and beta must lie in (0, 1)")


@dataclass(frozen=True)
class PlanProbabilities:
    p_a: float
    p_r: float
    p_c: float

    @property
    def decided(self) -> float:
        """``1 - p_c``, computed as ``p_a + p_r`` to keep tail accuracy."""
        return self.p_a + self.p_r

    @property
    def P_a(self) -> float:
        return self.p_a / self.decided

    @property
    def P_r(self) -> float:
        return self.p_r / self.decided


def normal_cdf(z):
    """Standard normal CDF; accepts scalars or arrays."""
    out = ndtr(z)
    return float(out) if np.ndim(out) == 0 else out


def plan_probabilities(t1: float, t2: float, moments: EstimatorMoments) -> PlanProbabilities:
    if not t2 > t1:
        raise ValueError(f"need t2 > t1, got t1={t1}, t2={t2}")
    if not moments.variance > 0:
        raise ValueError("estimator variance must be positive")
    s = moments.sd
    z1 = (t1 - moments.mean) / s
    z2 = (t2 - moments.mean) / s
    p_a = normal_cdf(-z2)
    p_r = normal_cdf(z1)
    # Difference of CDFs taken on the side where both are small.
    if z1 > 0:
        p_c = normal_cdf(-z1) - normal_cdf(-z2)
    else:
        p_c = normal_cdf(z2) - normal_cdf(z1)
    return PlanProbabilities(p_a, p_r, p_c)


def long_run_risks(t1, t2, at_aql: EstimatorMoments, at_uql: EstimatorMoments) -> tuple[float, float]:
    """Producer's risk ``P_r`` at the AQL and consumer's risk ``P_a`` at the UQL."""
    return (
        plan_probabilities(t1, t2, at_aql).P_r,
        plan_probabilities(t1, t2, at_uql).P_a,
    )


def expected_testing_cost(
    spec: PlanSpec,
    scheme: CensoringScheme,
    t1: float,
    t2: float,
    d_convention: Optional[int] = None,
    prec: int = DEFAULT_PREC,
) -> float:
    """``C * E[estimate] / (1 - p_c)`` evaluated at ``theta_A``."""
    m = estimator_moments(scheme, spec.theta_A, spec.prior, spec.loss, d_convention, prec)
    probs = plan_probabilities(t1, t2, m)
    if not probs.decided > 0:
        raise ZeroDivisionError("continuation probability is 1; the plan never stops")
    return spec.C * m.mean / probs.decided


@dataclass(frozen=True)
class PlanEvaluation:
    etc: float
    producer_risk: float
    consumer_risk: float
    slack_alpha: float
    slack_beta: float
    at_aql: PlanProbabilities
    at_uql: PlanProbabilities

    @property
    def feasible(self) -> bool:
        return self.slack_alpha >= 0 and self.slack_beta >= 0


def evaluate_plan(
    spec: PlanSpec,
    scheme: CensoringScheme,
    t1: float,
    t2: float,
    d_convention: Optional[int] = None,
    prec: int = DEFAULT_PREC,
) -> PlanEvaluation:
    """Recompute cost and both risk constraints for a given design from scratch."""
    m_a = estimator_moments(scheme, spec.theta_A, spec.prior, spec.loss, d_convention, prec)
    m_u = estimator_moments(scheme, spec.theta_U, spec.prior, spec.loss, d_convention, prec)
    pa = plan_probabilities(t1, t2, m_a)
    pu = plan_probabilities(t1, t2, m_u)
    return PlanEvaluation(
        etc=spec.C * m_a.mean / pa.decided,
        producer_risk=pa.P_r,
        consumer_risk=pu.P_a,
        slack_alpha=spec.alpha - pa.P_r,
        slack_beta=spec.beta - pu.P_a,
        at_aql=pa,
        at_uql=pu,
    )
