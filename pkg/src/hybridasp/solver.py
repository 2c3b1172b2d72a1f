"""Cost-optimal plan design.

The design problem: minimise the expected testing cost at the AQL over the
sample size ``n`` and thresholds ``t1 < t2`` subject to

    P_r(theta_A) <= alpha,   P_a(theta_U) <= beta.

``gamma`` is fixed first as the least value for which any design is
feasible; ``n`` is then searched exhaustively and ``(t1, t2)`` by a seeded
differential evolution with feasibility-first selection. All candidate
sample sizes are evolved together as one batched population.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import ndtr, ndtri

from .bayes import EstimatorDomainError
from .bayes import estimator_moments
from .censoring import CensoringScheme
from .mle_dist import DEFAULT_PREC, PrecisionError
from .plan import PlanSpec, evaluate_plan

__all__ = [
    "SearchBounds",
    "DEConfig",
    "PlanSolution",
    "solve_plan",
    "solve_for_gamma",
    "least_feasible_gamma",
    "integer_thresholds",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchBounds:
    n_max: int = 150
    t_max: Optional[float] = None  # defaults to 5 * theta_A

    def resolve_t_max(self, spec: PlanSpec) -> float:
        return 5.0 * spec.theta_A if self.t_max is None else float(self.t_max)


@dataclass(frozen=True)
class DEConfig:
    population: int = 40
    generations: int = 300
    restarts: int = 4
    mutation: float = 0.6
    crossover: float = 0.9
    # Smallest band width t2 - t1, relative to theta_A.
    min_band: float = 1e-6
    # A run ends early once no candidate has improved for this many generations.
    stall_generations: int = 60


@dataclass(frozen=True)
class PlanSolution:
    gamma: Optional[int]
    n: Optional[int]
    t1: float
    t2: float
    etc: float
    feasible: bool
    slack_alpha: float
    slack_beta: float
    d_convention: Optional[int] = None

    @property
    def constraint_slacks(self) -> tuple[float, float]:
        return self.slack_alpha, self.slack_beta

    def scheme_for(self, spec: PlanSpec) -> CensoringScheme:
        return CensoringScheme(self.n, self.gamma, spec.T)


def _candidate_moments(spec, gamma, ns, d_convention, prec):
    """Per-``n`` estimator mean/sd at both quality levels; NaN where undefined."""
    out = np.full((len(ns), 4), np.nan)
    for i, n in enumerate(ns):
        scheme = CensoringScheme(n, gamma, spec.T)
        try:
            ma = estimator_moments(scheme, spec.theta_A, spec.prior, spec.loss, d_convention, prec)
            mu = estimator_moments(scheme, spec.theta_U, spec.prior, spec.loss, d_convention, prec)
        except (EstimatorDomainError, PrecisionError) as exc:
            log.debug("n=%d gamma=%d skipped: %s", n, gamma, exc)
            continue
        if ma.variance > 0 and mu.variance > 0:
            out[i] = ma.mean, ma.sd, mu.mean, mu.sd
    return out


def _score(t1, t2, mom, spec):
    """ETC at the AQL and total constraint violation, broadcast over candidates."""
    m_a, s_a, m_u, s_u = (mom[:, j, None] for j in range(4))
    pa_A = ndtr((m_a - t2) / s_a)
    pr_A = ndtr((t1 - m_a) / s_a)
    pa_U = ndtr((m_u - t2) / s_u)
    pr_U = ndtr((t1 - m_u) / s_u)
    dec_A = pa_A + pr_A
    dec_U = pa_U + pr_U
    with np.errstate(divide="ignore", invalid="ignore"):
        etc = spec.C * m_a / dec_A
        viol = np.maximum(pr_A / dec_A - spec.alpha, 0) + np.maximum(pa_U / dec_U - spec.beta, 0)
    bad = ~(np.isfinite(etc) & np.isfinite(viol) & (dec_A > 0) & (dec_U > 0))
    etc = np.where(bad, np.inf, etc)
    viol = np.where(bad, np.inf, viol)
    return etc, viol


def _better(etc_new, viol_new, etc_old, viol_old):
    """Feasibility-first comparison: feasible beats infeasible, then ETC or violation."""
    feas_new = viol_new == 0
    feas_old = viol_old == 0
    return np.where(
        feas_new & feas_old,
        etc_new < etc_old,
        np.where(feas_new | feas_old, feas_new, viol_new < viol_old),
    )


def _decode(pop, lo_t1, t_max, log_band):
    t1 = np.clip(pop[..., 0], lo_t1, t_max)
    band = np.exp(np.clip(pop[..., 1], log_band[0], log_band[1]))
    return t1, t1 + band


def _partners(rng, N, P):
    """Three mutually distinct partner indices per member, none equal to the member."""
    o1 = rng.integers(1, P, (N, P))
    o2 = rng.integers(1, P - 1, (N, P))
    o2 += o2 >= o1
    o3 = rng.integers(1, P - 2, (N, P))
    lo, hi = np.minimum(o1, o2), np.maximum(o1, o2)
    o3 += o3 >= lo
    o3 += o3 >= hi
    own = np.arange(P)[None, :]
    return (own + o1) % P, (own + o2) % P, (own + o3) % P


def _evolve(mom, spec, t_max, cfg, rng, stop_on_feasible=False):
    """One differential-evolution run over (t1, log band) for every candidate row.

    Returns per-row best (t1, t2, etc, viol) arrays.
    """
    N, P = mom.shape[0], cfg.population
    lo_t1 = cfg.min_band * spec.theta_A
    log_band = (math.log(cfg.min_band * spec.theta_A), math.log(t_max))
    lower = np.array([lo_t1, log_band[0]])
    upper = np.array([t_max, log_band[1]])

    pop = lower + rng.random((N, P, 2)) * (upper - lower)
    # Member 0 starts at the closed-form collapsed-band design where one exists.
    t_lo = mom[:, 2] + mom[:, 3] * ndtri(1 - spec.beta)
    t_hi = mom[:, 0] - mom[:, 1] * ndtri(1 - spec.alpha)
    ok = (t_lo < t_hi) & (t_hi > lo_t1)
    pop[ok, 0, 0] = np.clip(0.5 * (t_lo[ok] + t_hi[ok]), lo_t1, t_max)
    pop[ok, 0, 1] = log_band[0]
    t1, t2 = _decode(pop, lo_t1, t_max, log_band)
    etc, viol = _score(t1, t2, mom, spec)

    rows = np.arange(N)[:, None]
    stall = 0
    for _ in range(cfg.generations):
        if stop_on_feasible and np.any(viol == 0):
            break
        if stall >= cfg.stall_generations:
            break
        # rand/1/bin with three distinct partners per member.
        r0, r1, r2 = (pop[rows, k] for k in _partners(rng, N, P))
        mutant = r0 + cfg.mutation * (r1 - r2)
        cross = rng.random((N, P, 2)) < cfg.crossover
        forced = rng.integers(0, 2, (N, P))
        cross[rows, np.arange(P)[None, :], forced] = True
        trial = np.where(cross, mutant, pop)
        # Reflect out-of-range coordinates back inside the box.
        trial = np.where(trial < lower, lower + rng.random(trial.shape) * (pop - lower), trial)
        trial = np.where(trial > upper, upper - rng.random(trial.shape) * (upper - pop), trial)

        tt1, tt2 = _decode(trial, lo_t1, t_max, log_band)
        e_new, v_new = _score(tt1, tt2, mom, spec)
        take = _better(e_new, v_new, etc, viol)
        improved = take & ((v_new < viol) | (e_new < etc * (1 - 1e-12)))
        stall = 0 if improved.any() else stall + 1
        pop = np.where(take[..., None], trial, pop)
        etc = np.where(take, e_new, etc)
        viol = np.where(take, v_new, viol)

    t1, t2 = _decode(pop, lo_t1, t_max, log_band)
    # Best member per row under the same ordering (violation, then ETC).
    key_v = np.where(np.isfinite(viol), viol, np.inf)
    order = np.lexsort((etc, key_v), axis=1)[:, 0]
    sel = (np.arange(N), order)
    return t1[sel], t2[sel], etc[sel], viol[sel]


def _search_gamma(spec, gamma, bounds, cfg, seed, d_convention, prec, stop_on_feasible, incumbent=math.inf):
    ns = list(range(gamma + 1, bounds.n_max + 1))
    if not ns:
        return None
    mom = _candidate_moments(spec, gamma, ns, d_convention, prec)
    valid = ~np.isnan(mom).any(axis=1)
    # ETC >= C * E[estimate], so candidates at or above the incumbent cannot win.
    with np.errstate(invalid="ignore"):
        valid &= ~(spec.C * mom[:, 0] >= incumbent)
    if not valid.any():
        return None
    ns = [n for n, ok in zip(ns, valid) if ok]
    mom = mom[valid]
    t_max = bounds.resolve_t_max(spec)

    best = None
    for restart in range(cfg.restarts):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(gamma, restart))))
        t1, t2, etc, viol = _evolve(mom, spec, t_max, cfg, rng, stop_on_feasible)
        for i, n in enumerate(ns):
            cand = (viol[i], etc[i], n, t1[i], t2[i])
            if best is None or cand < best:
                best = cand
        if stop_on_feasible and best[0] == 0:
            break
    return best


def solve_for_gamma(
    spec: PlanSpec,
    gamma: int,
    bounds: SearchBounds = SearchBounds(),
    seed: int = 0,
    d_convention: Optional[int] = None,
    cfg: DEConfig = DEConfig(),
    prec: int = DEFAULT_PREC,
) -> PlanSolution:
    """Minimise ETC over ``n`` and ``(t1, t2)`` with ``gamma`` held fixed."""
    best = _search_gamma(spec, gamma, bounds, cfg, seed, d_convention, prec, stop_on_feasible=False)
    if best is None:
        return PlanSolution(gamma, None, math.nan, math.nan, math.inf, False, -math.inf, -math.inf, d_convention)
    viol, _, n, t1, t2 = best
    ev = evaluate_plan(spec, CensoringScheme(n, gamma, spec.T), float(t1), float(t2), d_convention, prec)
    return PlanSolution(
        gamma=gamma,
        n=n,
        t1=float(t1),
        t2=float(t2),
        etc=ev.etc,
        feasible=viol == 0 and ev.feasible,
        slack_alpha=ev.slack_alpha,
        slack_beta=ev.slack_beta,
        d_convention=d_convention,
    )


def _cost_floor(spec, gamma, bounds, d_convention, prec):
    ns = list(range(gamma + 1, bounds.n_max + 1))
    mom = _candidate_moments(spec, gamma, ns, d_convention, prec)
    m = mom[:, 0]
    m = m[np.isfinite(m)]
    return spec.C * float(m.min()) if m.size else math.inf


def least_feasible_gamma(
    spec: PlanSpec,
    bounds: SearchBounds = SearchBounds(),
    seed: int = 0,
    d_convention: Optional[int] = None,
    cfg: DEConfig = DEConfig(),
    prec: int = DEFAULT_PREC,
):
    """Smallest ``gamma`` for which the search finds a design meeting both risks.

    Returns ``(gamma, None)`` on success, otherwise ``(None, fallback)`` where
    ``fallback`` is ``(gamma, best)`` for the least-violating point seen.
    """
    fallback = None
    for gamma in range(1, bounds.n_max):
        best = _search_gamma(spec, gamma, bounds, cfg, seed, d_convention, prec, stop_on_feasible=True)
        if best is None:
            continue
        if best[0] == 0:
            return gamma, None
        if fallback is None or best < fallback[1]:
            fallback = (gamma, best)
    return None, fallback


def solve_plan(
    spec: PlanSpec,
    bounds: SearchBounds = SearchBounds(),
    seed: int = 0,
    d_convention: Optional[int] = None,
    cfg: DEConfig = DEConfig(),
    prec: int = DEFAULT_PREC,
    gamma_policy: str = "cost",
    patience: int = 3,
) -> PlanSolution:
    """Design a plan: least feasible ``gamma`` first, then minimum ETC.

    ``gamma_policy="least"`` minimises ETC at the least feasible ``gamma``
    only. ``"cost"`` also lets ``gamma`` grow from there: each larger value
    is scanned with a single restart while its cost floor ``C * E[estimate]``
    can still beat the incumbent (stopping after ``patience`` hopeless values
    in a row), and the two best values are then re-solved with the full
    configuration.

    ``d_convention=None`` uses ``gamma`` as the failure count inside the
    estimator's delta-method moments. An infeasible problem returns a
    solution with ``feasible=False`` holding the least-violating point found.
    """
    if bounds.n_max < 2:
        raise ValueError("n_max must be at least 2")
    if gamma_policy not in ("least", "cost"):
        raise ValueError(f"unknown gamma_policy {gamma_policy!r}")

    gamma_min, fallback = least_feasible_gamma(spec, bounds, seed, d_convention, cfg, prec)
    if gamma_min is None:
        if fallback is None:
            return PlanSolution(None, None, math.nan, math.nan, math.inf, False, -math.inf, -math.inf, d_convention)
        gamma, (viol, etc, n, t1, t2) = fallback
        ev = evaluate_plan(spec, CensoringScheme(n, gamma, spec.T), float(t1), float(t2), d_convention, prec)
        return PlanSolution(gamma, n, float(t1), float(t2), ev.etc, False, ev.slack_alpha, ev.slack_beta, d_convention)
    log.info("least feasible gamma = %d", gamma_min)
    if gamma_policy == "least":
        return solve_for_gamma(spec, gamma_min, bounds, seed, d_convention, cfg, prec)

    scan_cfg = replace(cfg, restarts=1)
    scanned = []
    best_etc = math.inf
    misses = 0
    for gamma in range(gamma_min, bounds.n_max):
        if _cost_floor(spec, gamma, bounds, d_convention, prec) >= best_etc:
            misses += 1
            if misses >= patience:
                break
            continue
        misses = 0
        best = _search_gamma(spec, gamma, bounds, scan_cfg, seed, d_convention, prec, False, best_etc)
        if best is not None and best[0] == 0:
            scanned.append((best[1], gamma))
            best_etc = min(best_etc, best[1])
    scanned.sort()
    finalists = [gamma for _, gamma in scanned[:2]] or [gamma_min]
    log.info("gamma finalists: %s", finalists)

    solutions = [solve_for_gamma(spec, g, bounds, seed, d_convention, cfg, prec) for g in finalists]
    feasible = [s for s in solutions if s.feasible]
    pool = feasible or solutions
    return min(pool, key=lambda s: (s.etc, s.n, s.t1))


def integer_thresholds(
    spec: PlanSpec,
    solution: PlanSolution,
    radius: int = 25,
    prec: int = DEFAULT_PREC,
) -> PlanSolution:
    """Restrict ``t1 < t2`` to integers by local search around the continuous optimum.

    Candidates are ``floor/ceil(t) + k`` for ``|k| <= radius``; the feasible
    pair with the smallest ETC wins. If none is feasible the input solution
    is returned marked infeasible.
    """
    if solution.n is None:
        return solution
    scheme = solution.scheme_for(spec)
    d = solution.d_convention
    base1, base2 = math.floor(solution.t1), math.ceil(solution.t2)
    best = None
    for k1 in range(-radius, radius + 1):
        t1 = base1 + k1
        if t1 <= 0:
            continue
        for k2 in range(-radius, radius + 1):
            t2 = base2 + k2
            if t2 <= t1:
                continue
            try:
                ev = evaluate_plan(spec, scheme, float(t1), float(t2), d, prec)
            except (ValueError, ZeroDivisionError):
                continue
            if ev.feasible and (best is None or (ev.etc, t1, t2) < best[:3]):
                best = (ev.etc, t1, t2, ev)
    if best is None:
        return replace(solution, feasible=False)
    etc, t1, t2, ev = best
    return replace(solution, t1=float(t1), t2=float(t2), etc=etc, feasible=True,
                   slack_alpha=ev.slack_alpha, slack_beta=ev.slack_beta)
