# %% [markdown]
# Designing a plan and looking at its operating characteristic.
#
# Accept when the estimate reaches t2, reject below t1, otherwise test a
# fresh sample. The design minimises the expected testing cost at the AQL
# subject to both long-run risks.

# %%
import numpy as np

from hybridasp import PlanSpec, SearchBounds, estimator_moments, evaluate_plan, plan_probabilities, solve_plan

spec = PlanSpec(theta_A=2.0, theta_U=1.0, T=1.0, alpha=0.2, beta=0.2)
sol = solve_plan(spec, SearchBounds(n_max=8), seed=0)
print(sol)

# %%
# Both constraints recomputed from scratch
ev = evaluate_plan(spec, sol.scheme_for(spec), sol.t1, sol.t2)
print(f"producer risk {ev.producer_risk:.4f} (alpha {spec.alpha}), consumer risk {ev.consumer_risk:.4f} (beta {spec.beta})")

# %%
# OC curve: long-run acceptance probability against the true mean life
scheme = sol.scheme_for(spec)
for theta in np.linspace(0.5, 3.0, 11):
    p = plan_probabilities(sol.t1, sol.t2, estimator_moments(scheme, theta, spec.prior, spec.loss))
    print(f"theta {theta:4.2f}  P(accept) {p.P_a:.3f}  tests per decision {1 / p.decided:5.2f}")
