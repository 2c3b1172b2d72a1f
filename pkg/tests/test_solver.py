import math

import numpy as np
import pytest
from scipy.special import ndtr

from hybridasp.bayes import EstimatorDomainError, estimator_moments
from hybridasp.censoring import CensoringScheme
from hybridasp.plan import PlanSpec, evaluate_plan
from hybridasp.solver import DEConfig, SearchBounds, integer_thresholds, solve_for_gamma, solve_plan

SMALL = PlanSpec(2.0, 1.0, 1.0, 0.2, 0.2)
SMALL_BOUNDS = SearchBounds(n_max=8)


def grid_oracle(spec, n_values, grid):
    """Exhaustive minimum ETC over gamma < n, n in n_values, t1 < t2 on ``grid``."""
    t1, t2 = np.meshgrid(grid, grid, indexing="ij")
    valid = t1 < t2
    best = (math.inf, None)
    for n in n_values:
        for gamma in range(1, n):
            s = CensoringScheme(n, gamma, spec.T)
            try:
                a = estimator_moments(s, spec.theta_A, spec.prior, spec.loss)
                u = estimator_moments(s, spec.theta_U, spec.prior, spec.loss)
            except EstimatorDomainError:
                continue
            pa_A, pr_A = ndtr((a.mean - t2) / a.sd), ndtr((t1 - a.mean) / a.sd)
            pa_U, pr_U = ndtr((u.mean - t2) / u.sd), ndtr((t1 - u.mean) / u.sd)
            with np.errstate(divide="ignore", invalid="ignore"):
                ok = valid & (pr_A / (pa_A + pr_A) <= spec.alpha) & (pa_U / (pa_U + pr_U) <= spec.beta)
                etc = np.where(ok, spec.C * a.mean / (pa_A + pr_A), np.inf)
            i = np.unravel_index(np.argmin(etc), etc.shape)
            if etc[i] < best[0]:
                best = (float(etc[i]), (n, gamma, float(grid[i[0]]), float(grid[i[1]])))
    return best


@pytest.fixture(scope="module")
def small_solution():
    return solve_plan(SMALL, SMALL_BOUNDS, seed=0)


def test_small_instance_beats_grid(small_solution):
    oracle, where = grid_oracle(SMALL, range(2, 9), np.linspace(0.02, 4.0, 200))
    assert where is not None
    assert small_solution.feasible
    assert small_solution.etc <= oracle * 1.01


def test_reproducible(small_solution):
    again = solve_plan(SMALL, SMALL_BOUNDS, seed=0)
    assert again == small_solution
    for field in ("t1", "t2", "etc"):
        assert getattr(again, field).hex() == getattr(small_solution, field).hex()


def test_solution_recomputes(small_solution):
    s = small_solution
    ev = evaluate_plan(SMALL, s.scheme_for(SMALL), s.t1, s.t2)
    assert ev.slack_alpha >= -1e-9 and ev.slack_beta >= -1e-9
    assert ev.etc == pytest.approx(s.etc, rel=1e-12)
    assert s.constraint_slacks == (ev.slack_alpha, ev.slack_beta)
    assert 0 < s.t1 < s.t2 <= 5 * SMALL.theta_A
    assert s.gamma < s.n <= 8


def test_equal_quality_levels_infeasible():
    spec = PlanSpec(2.0, 2.0, 1.0, 0.2, 0.2)
    s = solve_plan(spec, SMALL_BOUNDS, seed=0)
    assert not s.feasible
    assert min(s.slack_alpha, s.slack_beta) < 0


def test_least_policy_not_cheaper(small_solution):
    least = solve_plan(SMALL, SMALL_BOUNDS, seed=0, gamma_policy="least")
    assert least.feasible
    assert small_solution.etc <= least.etc * (1 + 1e-12)
    with pytest.raises(ValueError):
        solve_plan(SMALL, SMALL_BOUNDS, gamma_policy="fastest")
    with pytest.raises(ValueError):
        solve_plan(SMALL, SearchBounds(n_max=1))


def test_fixed_gamma():
    s = solve_for_gamma(SMALL, 3, SMALL_BOUNDS, seed=1)
    assert s.gamma == 3 and s.feasible
    oracle, _ = grid_oracle_fixed_gamma(3)
    assert s.etc <= oracle * 1.01


def grid_oracle_fixed_gamma(gamma):
    best = (math.inf, None)
    for n in range(gamma + 1, 9):
        etc, where = grid_oracle_one(n, gamma)
        best = min(best, (etc, where), key=lambda x: x[0])
    return best


def grid_oracle_one(n, gamma):
    spec = SMALL
    s = CensoringScheme(n, gamma, spec.T)
    grid = np.linspace(0.02, 4.0, 200)
    t1, t2 = np.meshgrid(grid, grid, indexing="ij")
    a = estimator_moments(s, spec.theta_A, spec.prior, spec.loss)
    u = estimator_moments(s, spec.theta_U, spec.prior, spec.loss)
    pa_A, pr_A = ndtr((a.mean - t2) / a.sd), ndtr((t1 - a.mean) / a.sd)
    pa_U, pr_U = ndtr((u.mean - t2) / u.sd), ndtr((t1 - u.mean) / u.sd)
    ok = (t1 < t2) & (pr_A / (pa_A + pr_A) <= spec.alpha) & (pa_U / (pa_U + pr_U) <= spec.beta)
    etc = np.where(ok, a.mean / (pa_A + pr_A), np.inf)
    return float(etc.min()), (n, gamma)


def test_integer_thresholds_small_problem():
    spec = PlanSpec(200.0, 100.0, 100.0, 0.2, 0.2)
    s = solve_plan(spec, SearchBounds(n_max=10), seed=0, cfg=DEConfig(restarts=1))
    assert s.feasible
    r = integer_thresholds(spec, s)
    assert r.feasible
    assert r.t1 == int(r.t1) and r.t2 == int(r.t2)
    ev = evaluate_plan(spec, r.scheme_for(spec), r.t1, r.t2)
    assert ev.feasible and ev.etc == pytest.approx(r.etc)
    assert r.etc >= s.etc * (1 - 1e-9)


@pytest.mark.slow
def test_published_row_500_200_50():
    spec = PlanSpec(500.0, 200.0, 50.0, 0.05, 0.05)
    s = solve_plan(spec, seed=0)
    assert s.feasible
    ev = evaluate_plan(spec, s.scheme_for(spec), s.t1, s.t2)
    assert ev.slack_alpha >= -1e-9 and ev.slack_beta >= -1e-9
    assert s.etc <= 475.5810 * 1.15
