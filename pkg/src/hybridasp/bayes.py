"""Bayes estimators of the mean life and their delta-method normal laws.

Prior: inverted gamma with scale ``a`` and shape ``b``. Two losses are
supported, squared error (posterior mean) and Linex with asymmetry ``c``,
the latter through its closed-form Lindley approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .censoring import CensoringScheme
from .mle_dist import DEFAULT_PREC, mle_moments

__all__ = [
    "Prior",
    "LossSpec",
    "SEL",
    "EstimatorMoments",
    "EstimatorDomainError",
    "sel_estimate",
    "linex_estimate",
    "bayes_estimate",
    "posterior_pdf",
    "estimator_moments",
]


class EstimatorDomainError(ValueError):
    """The estimator is undefined for the given inputs."""


@dataclass(frozen=True)
class Prior:
    """Inverted-gamma prior; ``a = b = 0`` is the non-informative limit."""

    a: float = 1.25
    b: float = 2.5

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError(f"prior hyperparameters must be >= 0, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class LossSpec:
    kind: str = "sel"
    c: Optional[float] = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind == "sel":
            if self.c is not None:
                raise ValueError("c is only meaningful for the Linex loss")
        elif kind == "linex":
            if self.c is None or self.c == 0:
                raise ValueError("Linex loss needs a nonzero c")
        else:
            raise ValueError(f"unknown loss kind {self.kind!r}")

    @classmethod
    def linex(cls, c: float) -> "LossSpec":
        return cls("linex", c)

    def __str__(self):
        return "SEL" if self.kind == "sel" else f"Linex(c={self.c:g})"


SEL = LossSpec("sel")


@dataclass(frozen=True)
class EstimatorMoments:
    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


def sel_estimate(theta_mle, D, prior: Prior):
    """Posterior mean ``(D*mle + a) / (D + b - 1)``; vectorises over arrays."""
    if np.any(np.asarray(D) + prior.b <= 1):
        raise EstimatorDomainError("posterior mean needs D + b > 1")
    return (D * np.asarray(theta_mle, dtype=float) + prior.a) / (D + prior.b - 1)


def _linex_argument(theta_mle, D, prior, c):
    return 1 + c / (2 * D) * (c * theta_mle**2 - 2 * prior.a + 2 * theta_mle * (prior.b - 1))


def linex_estimate(theta_mle, D, prior: Prior, c: float, strict: bool = True):
    """Lindley-approximated Linex estimate.

    ``mle - log(1 + c/(2D) * (c*mle^2 - 2a + 2*mle*(b-1))) / c``.

    With ``strict`` a non-positive log argument raises
    :class:`EstimatorDomainError`; otherwise those entries come back as NaN.
    """
    if c == 0:
        raise ValueError("c must be nonzero")
    x = np.asarray(theta_mle, dtype=float)
    arg = _linex_argument(x, D, prior, c)
    bad = ~(arg > 0)
    if strict and np.any(bad):
        raise EstimatorDomainError(f"Lindley approximation breaks down (log argument {np.min(arg):g})")
    with np.errstate(invalid="ignore", divide="ignore"):
        est = x - np.log(np.where(bad, np.nan, arg)) / c
    return float(est) if est.ndim == 0 else est


def bayes_estimate(theta_mle, D, prior: Prior, loss: LossSpec, strict: bool = True):
    if loss.kind == "sel":
        return sel_estimate(theta_mle, D, prior)
    return linex_estimate(theta_mle, D, prior, loss.c, strict=strict)


def posterior_pdf(theta, theta_mle, D, prior: Prior):
    """Inverted-gamma posterior with shape ``D + b`` and scale ``D*mle + a``."""
    scale = D * theta_mle + prior.a
    shape = D + prior.b
    if not (scale > 0 and shape > 0):
        raise ValueError("posterior needs D*mle + a > 0 and D + b > 0")
    t = np.asarray(theta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logpdf = shape * math.log(scale) - math.lgamma(shape) - (shape + 1) * np.log(t) - scale / t
    out = np.where(t > 0, np.exp(logpdf), 0.0)
    return float(out) if out.ndim == 0 else out


def estimator_moments(
    scheme: CensoringScheme,
    theta: float,
    prior: Prior,
    loss: LossSpec,
    d_convention: Optional[int] = None,
    prec: int = DEFAULT_PREC,
) -> EstimatorMoments:
    """Delta-method mean and variance of the Bayes estimator at ``theta``.

    The estimator is a smooth function ``U`` of the MLE; its law is taken as
    normal with mean ``U(E[mle])`` and variance ``U'(E[mle])**2 * Var[mle]``.
    The failure count inside ``U`` is the fixed ``d_convention`` (default
    ``gamma``), not the random ``D``.
    """
    d = scheme.gamma if d_convention is None else d_convention
    if d < 1:
        raise ValueError(f"d_convention must be >= 1, got {d}")
    mm = mle_moments(scheme, theta, prec)
    e, var = mm.mean, mm.variance
    a, b = prior.a, prior.b
    if loss.kind == "sel":
        if d + b <= 1:
            raise EstimatorDomainError("posterior mean needs d + b > 1")
        factor = d / (d + b - 1)
        return EstimatorMoments((d * e + a) / (d + b - 1), factor**2 * var)

    c = loss.c
    inner = c * e**2 - 2 * a + 2 * e * (b - 1)
    arg = 1 + c / (2 * d) * inner
    if not arg > 0:
        raise EstimatorDomainError(f"Lindley approximation breaks down at E[mle]={e:g}")
    mean = e - math.log(arg) / c
    slope = 1 - (2 * c * e + 2 * b - 2) / (2 * d + c * inner)
    return EstimatorMoments(mean, slope**2 * var)
