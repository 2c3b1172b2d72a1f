"""Cost-optimal variable acceptance sampling plans for exponential lifetimes
under Type I hybrid censoring, with Bayes estimates as the decision statistic.
"""

from .bayes import (
    SEL,
    EstimatorDomainError,
    EstimatorMoments,
    LossSpec,
    Prior,
    bayes_estimate,
    estimator_moments,
    linex_estimate,
    posterior_pdf,
    sel_estimate,
)
from .censoring import CensoredSample, CensoringScheme, censor, mle, simulate_mle, simulate_sample
from .mle_dist import MleMoments, PrecisionError, mle_cdf, mle_moments, mle_pdf
from .plan import PlanSpec, evaluate_plan, expected_testing_cost, normal_cdf, plan_probabilities
from .simulate import run_plan, validate_moments
from .solver import DEConfig, PlanSolution, SearchBounds, integer_thresholds, solve_for_gamma, solve_plan

__version__ = "0.1.0"

__all__ = [
    "SEL",
    "EstimatorDomainError",
    "EstimatorMoments",
    "LossSpec",
    "Prior",
    "bayes_estimate",
    "estimator_moments",
    "linex_estimate",
    "posterior_pdf",
    "sel_estimate",
    "CensoredSample",
    "CensoringScheme",
    "censor",
    "mle",
    "simulate_mle",
    "simulate_sample",
    "MleMoments",
    "PrecisionError",
    "mle_cdf",
    "mle_moments",
    "mle_pdf",
    "PlanSpec",
    "evaluate_plan",
    "expected_testing_cost",
    "normal_cdf",
    "plan_probabilities",
    "run_plan",
    "validate_moments",
    "DEConfig",
    "PlanSolution",
    "SearchBounds",
    "integer_thresholds",
    "solve_for_gamma",
    "solve_plan",
]
