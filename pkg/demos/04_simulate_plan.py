# %% [markdown]
# Running a designed plan by simulation.
#
# The analytic design assumes a normal estimator with delta-method moments.
# Here the sequential procedure is played out draw by draw.

# %%
from hybridasp import EstimatorMoments, PlanSpec, SearchBounds, plan_probabilities, run_plan, solve_plan

spec = PlanSpec(2.0, 1.0, 1.0, 0.2, 0.2)
sol = solve_plan(spec, SearchBounds(n_max=8), seed=0)

# %%
for theta in (spec.theta_A, spec.theta_U):
    rep = run_plan(sol, spec, theta, trials=100_000, seed=3)
    print(f"theta={theta}: P_a {rep.empirical_P_a:.4f}  P_r {rep.empirical_P_r:.4f}  "
          f"iterations {rep.mean_iterations:.3f}  ETC {rep.empirical_etc:.4f}")

# %% [markdown]
# Per-draw frequencies against the normal model fitted to the simulated
# estimates. With only 4 failures the estimator is skewed, so the two differ
# even though the long-run risks stay close to their targets.

# %%
rep = run_plan(sol, spec, spec.theta_A, trials=100_000, seed=8)
p = plan_probabilities(sol.t1, sol.t2, EstimatorMoments(rep.estimate_mean, rep.estimate_var))
print(f"accept   {rep.draw_accept / rep.draws:.4f}  normal {p.p_a:.4f}")
print(f"continue {rep.draw_continue / rep.draws:.4f}  normal {p.p_c:.4f}")
print(f"reject   {rep.draw_reject / rep.draws:.4f}  normal {p.p_r:.4f}")
