"""Monte Carlo checks of the analytic machinery.

``run_plan`` executes the sequential accept/continue/reject procedure many
times; ``validate_moments`` compares simulated MLE and estimator moments with
the exact and delta-method values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bayes import LossSpec, Prior, bayes_estimate, estimator_moments
from .censoring import BLOCK_SIZE, CensoringScheme, _mle_rows, exponential_lifetimes, make_generator, simulate_mle
from .mle_dist import mle_moments
from .plan import PlanSpec

__all__ = ["SimulationReport", "run_plan", "MomentCheck", "MomentValidation", "validate_moments"]

MAX_ITERATIONS = 10_000


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    empirical_P_a: float
    empirical_P_r: float
    mean_iterations: float
    empirical_etc: float
    standard_errors: dict
    # Per-draw tallies over every iteration of every trial.
    draws: int = 0
    draw_accept: int = 0
    draw_continue: int = 0
    draw_reject: int = 0
    estimate_mean: float = math.nan
    estimate_var: float = math.nan

    def as_row(self) -> dict:
        row = {k: getattr(self, k) for k in (
            "trials", "empirical_P_a", "empirical_P_r", "mean_iterations", "empirical_etc",
            "draws", "draw_accept", "draw_continue", "draw_reject", "estimate_mean", "estimate_var",
        )}
        row.update({f"se_{k}": v for k, v in self.standard_errors.items()})
        return row


def _draw_round(scheme, theta, count, seed, round_no):
    """``count`` fresh censored tests for one iteration round; returns (mle, D, t_star)."""
    root = np.random.SeedSequence(seed)
    est_parts, d_parts, t_parts = [], [], []
    for block in range(-(-count // BLOCK_SIZE)):
        size = min(BLOCK_SIZE, count - block * BLOCK_SIZE)
        rng = make_generator(np.random.SeedSequence(root.entropy, spawn_key=(round_no, block)))
        x = np.sort(exponential_lifetimes(rng, theta, (size, scheme.n)), axis=1, kind="stable")
        est, D = _mle_rows(x, scheme)
        est_parts.append(est)
        d_parts.append(D)
        t_parts.append(np.minimum(x[:, scheme.gamma - 1], scheme.T))
    return np.concatenate(est_parts), np.concatenate(d_parts), np.concatenate(t_parts)


def run_plan(
    solution,
    spec: PlanSpec,
    theta: float,
    trials: int,
    seed: int = 0,
    duration: str = "estimate",
    thresholds: Optional[tuple] = None,
) -> SimulationReport:
    """Simulate the sequential plan ``trials`` times at true mean life ``theta``.

    Every iteration draws a fresh sample of ``solution.n`` units, computes the
    Bayes estimate with the observed failure count and applies the
    accept/continue/reject rule. A test with no failure is a continuation;
    its estimate uses ``mle = n*T`` with one failure in place of zero.
    The cost of an iteration is ``C`` times the estimate
    (``duration="estimate"``) or ``C`` times the termination time
    (``duration="t_star"``).
    """
    if not solution.feasible:
        raise ValueError("run_plan needs a feasible solution")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if duration not in ("estimate", "t_star"):
        raise ValueError(f"unknown duration {duration!r}")
    t1, t2 = thresholds if thresholds is not None else (solution.t1, solution.t2)
    scheme = CensoringScheme(solution.n, solution.gamma, spec.T)

    outcome = np.zeros(trials, dtype=np.int8)  # +1 accept, -1 reject
    iterations = np.zeros(trials, dtype=np.int64)
    cost = np.zeros(trials)
    active = np.arange(trials)
    tallies = np.zeros(3, dtype=np.int64)  # accept, continue, reject
    est_sum = est_sq = 0.0
    n_est = 0

    for round_no in range(MAX_ITERATIONS):
        if active.size == 0:
            break
        theta_mle, D, t_star = _draw_round(scheme, theta, active.size, seed, round_no)
        est = bayes_estimate(theta_mle, np.maximum(D, 1), spec.prior, spec.loss)
        accept = (est >= t2) & (D > 0)
        reject = (est < t1) & (D > 0)
        iterations[active] += 1
        cost[active] += spec.C * (est if duration == "estimate" else t_star)
        tallies += [accept.sum(), (~accept & ~reject).sum(), reject.sum()]
        observed = est[D > 0]
        est_sum += observed.sum()
        est_sq += np.square(observed).sum()
        n_est += observed.size
        outcome[active[accept]] = 1
        outcome[active[reject]] = -1
        active = active[~(accept | reject)]
    else:
        if active.size:
            raise RuntimeError(f"{active.size} trials still undecided after {MAX_ITERATIONS} iterations")

    P_a = float(np.mean(outcome == 1))
    se_p = math.sqrt(P_a * (1 - P_a) / trials)
    mean_est = est_sum / n_est if n_est else math.nan
    var_est = (est_sq / n_est - mean_est**2) * n_est / (n_est - 1) if n_est > 1 else math.nan
    return SimulationReport(
        trials=trials,
        empirical_P_a=P_a,
        empirical_P_r=1.0 - P_a,
        mean_iterations=float(iterations.mean()),
        empirical_etc=float(cost.mean()),
        standard_errors={
            "P_a": se_p,
            "P_r": se_p,
            "mean_iterations": float(iterations.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan,
            "etc": float(cost.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan,
        },
        draws=int(tallies.sum()),
        draw_accept=int(tallies[0]),
        draw_continue=int(tallies[1]),
        draw_reject=int(tallies[2]),
        estimate_mean=mean_est,
        estimate_var=var_est,
    )


@dataclass(frozen=True)
class MomentCheck:
    """Simulated versus analytic mean and variance of one statistic."""

    analytic_mean: float
    analytic_var: float
    sample_mean: float
    sample_var: float
    se_mean: float
    se_var: float

    @property
    def z_mean(self) -> float:
        return (self.sample_mean - self.analytic_mean) / self.se_mean

    @property
    def z_var(self) -> float:
        return (self.sample_var - self.analytic_var) / self.se_var


@dataclass(frozen=True)
class MomentValidation:
    trials: int
    mle: MomentCheck
    estimator: Optional[MomentCheck]
    draws: dict = field(repr=False, default_factory=dict)


def _check(values, mean, var):
    n = values.size
    m = float(np.mean(values))
    c = values - m
    s2 = float(np.mean(c**2)) * n / (n - 1)
    m4 = float(np.mean(c**4))
    # Large-sample SE of the sample variance.
    se_var = math.sqrt(max(m4 - s2**2, 0.0) / n)
    return MomentCheck(mean, var, m, s2, math.sqrt(s2 / n), se_var)


def validate_moments(
    scheme: CensoringScheme,
    theta: float,
    prior: Optional[Prior],
    loss: Optional[LossSpec],
    trials: int,
    seed: int = 0,
    d_convention: Optional[int] = None,
) -> MomentValidation:
    """Compare simulated conditional MLEs (``D >= 1``) with the exact moments.

    When ``prior`` and ``loss`` are given the Bayes estimator is also checked
    against its delta-method moments. The estimator is evaluated with the
    same fixed failure count the delta method uses (``d_convention``,
    default ``gamma``), so the comparison isolates the linearisation error.
    The raw draws are returned in ``draws``.
    """
    theta_mle, D = simulate_mle(scheme, theta, trials, seed)
    mm = mle_moments(scheme, theta)
    out_mle = _check(theta_mle, mm.mean, mm.variance)
    draws = {"mle": theta_mle, "D": D}
    est_check = None
    if prior is not None and loss is not None:
        d = scheme.gamma if d_convention is None else d_convention
        est = bayes_estimate(theta_mle, d, prior, loss, strict=False)
        draws["estimate"] = est
        em = estimator_moments(scheme, theta, prior, loss, d_convention)
        finite = est[np.isfinite(est)]
        est_check = _check(finite, em.mean, em.variance)
    return MomentValidation(trials, out_mle, est_check, draws)
