"""Type I hybrid censoring: data model, sample generation and the conditional MLE.

A life test puts ``n`` units on test and stops at ``T* = min(T, X_(gamma))``,
the earlier of a fixed time ``T`` and the ``gamma``-th ordered failure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CensoringScheme",
    "CensoredSample",
    "make_generator",
    "exponential_lifetimes",
    "censor",
    "simulate_sample",
    "mle",
    "simulate_mle",
]

# Fixed-size blocks keep bulk simulation independent of how work is scheduled.
BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class CensoringScheme:
    """Test design: sample size ``n``, failure count ``gamma`` and time limit ``T``.

    ``gamma == n`` is accepted so that fully observed data can still be fed to
    :func:`mle`; plan design and simulation call :meth:`require_proper`.
    """

    n: int
    gamma: int
    T: float

    def __post_init__(self):
        if int(self.n) != self.n or int(self.gamma) != self.gamma:
            raise ValueError("n and gamma must be integers")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        if self.gamma > self.n:
            raise ValueError(f"gamma must not exceed n, got gamma={self.gamma}, n={self.n}")
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")

    def require_proper(self) -> None:
        """Raise unless ``gamma < n``, which sampling plans and the MLE law need."""
        if self.gamma >= self.n:
            raise ValueError(f"gamma must be < n, got gamma={self.gamma}, n={self.n}")


@dataclass(frozen=True)
class CensoredSample:
    """One realised hybrid-censored data set.

    ``failures`` holds the ordered lifetimes observed up to ``t_star``;
    ``D`` is their count.
    """

    failures: tuple[float, ...]
    t_star: float

    @property
    def D(self) -> int:
        return len(self.failures)

    def __post_init__(self):
        f = self.failures
        if any(b < a for a, b in zip(f, f[1:])):
            raise ValueError("failures must be sorted")
        if f and f[-1] > self.t_star:
            raise ValueError("failures must not exceed t_star")


def make_generator(seed) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by ``seed`` through SeedSequence mixing."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def exponential_lifetimes(rng: np.random.Generator, theta: float, size) -> np.ndarray:
    """Exponential(mean ``theta``) variates by inverse-CDF transform."""
    u = rng.random(size)
    return -theta * np.log1p(-u)


def censor(lifetimes, scheme: CensoringScheme) -> CensoredSample:
    """Apply Type I hybrid censoring to a full set of ``n`` lifetimes."""
    x = np.sort(np.asarray(lifetimes, dtype=float), kind="stable")
    if x.size != scheme.n:
        raise ValueError(f"expected {scheme.n} lifetimes, got {x.size}")
    x_gamma = x[scheme.gamma - 1]
    if x_gamma <= scheme.T:
        return CensoredSample(tuple(x[: scheme.gamma].tolist()), float(x_gamma))
    D = int(np.searchsorted(x, scheme.T, side="right"))
    return CensoredSample(tuple(x[:D].tolist()), float(scheme.T))


def simulate_sample(scheme: CensoringScheme, theta: float, seed) -> CensoredSample:
    """Draw ``n`` exponential lifetimes and censor them; deterministic in ``seed``."""
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    scheme.require_proper()
    rng = make_generator(seed)
    return censor(exponential_lifetimes(rng, theta, scheme.n), scheme)


def mle(sample: CensoredSample, scheme: CensoringScheme) -> float:
    """Conditional MLE of the mean life.

    Three cases: ``D = gamma`` uses the total time on test up to the
    ``gamma``-th failure, ``1 <= D < gamma`` charges the survivors ``T``
    each, and ``D = 0`` returns ``n*T``.
    """
    n, gamma, T = scheme.n, scheme.gamma, scheme.T
    D = sample.D
    if D > gamma:
        raise ValueError(f"sample has D={D} failures but gamma={gamma}")
    if D == 0:
        return n * T
    total = float(np.sum(sample.failures))
    if D == gamma:
        return (total + (n - gamma) * sample.failures[-1]) / gamma
    return (total + (n - D) * T) / D


def _mle_rows(x: np.ndarray, scheme: CensoringScheme) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised MLE over rows of sorted lifetimes; returns (mle, D)."""
    n, gamma, T = scheme.n, scheme.gamma, scheme.T
    head = x[:, :gamma]
    observed = head <= T
    d_time = observed.sum(axis=1)
    x_gamma = head[:, -1]
    full = x_gamma <= T

    censored_total = np.where(observed, head, 0.0).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        type_two = (censored_total + (n - d_time) * T) / d_time
    type_one = (head.sum(axis=1) + (n - gamma) * x_gamma) / gamma

    est = np.where(full, type_one, type_two)
    D = np.where(full, gamma, d_time)
    est = np.where(D == 0, n * T, est)
    return est, D


def simulate_mle(
    scheme: CensoringScheme,
    theta: float,
    trials: int,
    seed,
    conditional: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate MLEs of many independent hybrid-censored tests.

    Trials are generated in fixed blocks of ``BLOCK_SIZE``; block ``i`` draws
    from a stream keyed by ``(seed, i)``. With ``conditional=True`` only
    tests with at least one failure are kept, and generation continues until
    ``trials`` such tests exist.

    Returns
    -------
    estimates, D : ndarray
        MLE values and failure counts, each of length ``trials``.
    """
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    scheme.require_proper()
    root = np.random.SeedSequence(seed)
    est_parts, d_parts = [], []
    have = 0
    block = 0
    while have < trials:
        rng = make_generator(np.random.SeedSequence(root.entropy, spawn_key=(block,)))
        x = np.sort(exponential_lifetimes(rng, theta, (BLOCK_SIZE, scheme.n)), axis=1, kind="stable")
        est, D = _mle_rows(x, scheme)
        if conditional:
            keep = D > 0
            est, D = est[keep], D[keep]
        est_parts.append(est)
        d_parts.append(D)
        have += est.size
        block += 1
        if have == 0 and block >= 256:
            raise RuntimeError("no test with a failure in 256 blocks; T/theta is too small")
    return np.concatenate(est_parts)[:trials], np.concatenate(d_parts)[:trials]
