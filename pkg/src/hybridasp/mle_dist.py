"""Exact law of the conditional MLE (given at least one failure).

The density is a signed mixture of shifted gamma kernels
``q(x - shift; D/theta, D)``, normalised by ``1 - v**n`` with
``v = exp(-T/theta)``. Its weights are alternating binomial terms that grow
like ``binom(n, D)``, so every sum is carried out in multi-precision
arithmetic with exact integer binomials and only rounded to float at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import mpmath

from .censoring import CensoringScheme

__all__ = [
    "DEFAULT_PREC",
    "MleMoments",
    "PrecisionError",
    "mixture_terms",
    "mle_pdf",
    "mle_cdf",
    "mle_moments",
    "mle_mean",
    "mle_second_moment",
    "mle_variance",
]

DEFAULT_PREC = 256
# Relative size of a negative variance still attributed to rounding.
VARIANCE_TOL = 1e-9


class PrecisionError(ArithmeticError):
    """Raised when cancellation leaves a clearly negative variance."""


@dataclass(frozen=True)
class MleMoments:
    mean: float
    second_moment: float
    variance: float


def _context(prec: int) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


def _check(scheme: CensoringScheme, theta: float) -> None:
    scheme.require_proper()
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")


def _powers(v, n):
    vpow = [v ** 0]
    for _ in range(n):
        vpow.append(vpow[-1] * v)
    return vpow


def _row_terms(n, D, T, vpow):
    """Kernels of the ``1 <= D < gamma`` group for one failure count ``D``."""
    c_nd = comb(n, D)
    for k in range(D + 1):
        yield (-1) ** k * c_nd * comb(D, k) * vpow[n - D + k], (n - D + k) * T / D, D


def _top_terms(n, gamma, T, vpow):
    """Pure gamma kernel plus the ``D = gamma`` correction kernels."""
    yield vpow[0], T * 0, gamma
    lead = gamma * comb(n, gamma)
    for k in range(1, gamma + 1):
        m = n - gamma + k
        yield (-1) ** k * lead * comb(gamma - 1, k - 1) * vpow[m] / m, m * T / gamma, gamma


def mixture_terms(scheme: CensoringScheme, theta: float, ctx) -> list[tuple]:
    """Kernel list ``(weight, shift, shape)`` of the unnormalised density.

    Three groups: ``1 <= D < gamma`` with weights
    ``(-1)^k C(n,D) C(D,k) v^(n-D+k)``, the pure gamma kernel of shape
    ``gamma`` with unit weight, and the ``D = gamma`` correction terms.
    """
    n, gamma = scheme.n, scheme.gamma
    T = ctx.mpf(scheme.T)
    vpow = _powers(ctx.exp(-T / ctx.mpf(theta)), n)
    terms = []
    for D in range(1, gamma):
        terms.extend(_row_terms(n, D, T, vpow))
    terms.extend(_top_terms(n, gamma, T, vpow))
    return terms


def _norm(scheme, theta, ctx):
    return 1 - ctx.exp(-ctx.mpf(scheme.T) / ctx.mpf(theta)) ** scheme.n


def mle_pdf(x: float, scheme: CensoringScheme, theta: float, prec: int = DEFAULT_PREC) -> float:
    """Density of the conditional MLE at ``x``; zero outside ``(0, n*T)``."""
    _check(scheme, theta)
    if not 0 < x < scheme.n * scheme.T:
        return 0.0
    ctx = _context(prec)
    x = ctx.mpf(x)
    th = ctx.mpf(theta)
    parts = []
    for w, shift, D in mixture_terms(scheme, theta, ctx):
        y = x - shift
        if y <= 0:
            continue
        rate = D / th
        parts.append(w * rate**D * y ** (D - 1) * ctx.exp(-rate * y) / ctx.factorial(D - 1))
    return float(ctx.fsum(parts) / _norm(scheme, theta, ctx))


def mle_cdf(x: float, scheme: CensoringScheme, theta: float, prec: int = DEFAULT_PREC) -> float:
    """Distribution function of the conditional MLE, via regularised incomplete gammas."""
    _check(scheme, theta)
    if x <= 0:
        return 0.0
    if x >= scheme.n * scheme.T:
        return 1.0
    ctx = _context(prec)
    x = ctx.mpf(x)
    th = ctx.mpf(theta)
    parts = []
    for w, shift, D in mixture_terms(scheme, theta, ctx):
        y = x - shift
        if y <= 0:
            continue
        parts.append(w * ctx.gammainc(D, 0, D * y / th, regularized=True))
    return float(ctx.fsum(parts) / _norm(scheme, theta, ctx))


def _kernel_moment_sums(ctx, terms, th):
    first, second = [], []
    for w, shift, D in terms:
        first.append(w * (th + shift))
        second.append(w * (th**2 * (1 + D) / D + 2 * shift * th + shift**2))
    return ctx.fsum(first), ctx.fsum(second)


@lru_cache(maxsize=None)
def _setup(n: int, T: float, theta: float, prec: int):
    ctx = _context(prec)
    Tm = ctx.mpf(T)
    v = ctx.exp(-Tm / ctx.mpf(theta))
    return ctx, Tm, _powers(v, n)


@lru_cache(maxsize=1 << 18)
def _row_moment_sums(n: int, D: int, T: float, theta: float, prec: int):
    ctx, Tm, vpow = _setup(n, T, theta, prec)
    return _kernel_moment_sums(ctx, _row_terms(n, D, Tm, vpow), ctx.mpf(theta))


@lru_cache(maxsize=1 << 16)
def _raw_moments(n: int, gamma: int, T: float, theta: float, prec: int):
    # Rows D < gamma do not depend on gamma; caching them makes a sweep over
    # gamma quadratic rather than cubic.
    ctx, Tm, vpow = _setup(n, T, theta, prec)
    rows = [_row_moment_sums(n, D, T, theta, prec) for D in range(1, gamma)]
    top = _kernel_moment_sums(ctx, _top_terms(n, gamma, Tm, vpow), ctx.mpf(theta))
    z = 1 - vpow[n]
    m1 = ctx.fsum([r[0] for r in rows] + [top[0]]) / z
    m2 = ctx.fsum([r[1] for r in rows] + [top[1]]) / z
    return m1, m2, m2 - m1**2


def mle_moments(scheme: CensoringScheme, theta: float, prec: int = DEFAULT_PREC) -> MleMoments:
    """Mean, second moment and variance of the conditional MLE.

    Raises
    ------
    PrecisionError
        If the variance comes out below ``-1e-9 * mean**2``; small negative
        values above that are clamped to zero.
    """
    _check(scheme, theta)
    m1, m2, var = _raw_moments(scheme.n, scheme.gamma, float(scheme.T), float(theta), prec)
    mean, second, var = float(m1), float(m2), float(var)
    if var < 0:
        if var < -VARIANCE_TOL * mean**2:
            raise PrecisionError(
                f"negative variance {var:g} for {scheme}, theta={theta}; raise prec (now {prec})"
            )
        var = 0.0
    return MleMoments(mean, second, var)


def mle_mean(scheme: CensoringScheme, theta: float, prec: int = DEFAULT_PREC) -> float:
    return mle_moments(scheme, theta, prec).mean


def mle_second_moment(scheme: CensoringScheme, theta: float, prec: int = DEFAULT_PREC) -> float:
    return mle_moments(scheme, theta, prec).second_moment


def mle_variance(scheme: CensoringScheme, theta: float, prec: int = DEFAULT_PREC) -> float:
    return mle_moments(scheme, theta, prec).variance
