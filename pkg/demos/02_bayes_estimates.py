# %% [markdown]
# Bayes estimates of the mean life under squared-error and Linex loss.
#
# With an inverted-gamma prior (a, b) the posterior mean is
# (D*mle + a)/(D + b - 1). The Linex estimate uses a Lindley approximation.

# %%
import numpy as np

from hybridasp import SEL, CensoringScheme, LossSpec, Prior, estimator_moments, linex_estimate, sel_estimate

prior = Prior(a=1.25, b=2.5)

# %%
print("SEL, gamma=9 plan:      ", round(float(sel_estimate(27067 / 9, 9, prior)), 4))
print("Linex c=0.5, gamma=11:  ", round(linex_estimate(31968 / 11, 11, prior, 0.5), 4))

# %%
# Positive c punishes overestimation, so the estimate is pulled down.
x = np.linspace(100, 400, 7)
for c in (-0.5, 0.5):
    print(f"c={c:+.1f}", np.round(linex_estimate(x, 26, prior, c), 2))
print("SEL   ", np.round(sel_estimate(x, 26, prior), 2))

# %% [markdown]
# For plan design the estimator is treated as normal, with delta-method
# moments taken around the exact MLE moments.

# %%
scheme = CensoringScheme(31, 26, 100.0)
for loss in (SEL, LossSpec.linex(0.5), LossSpec.linex(-0.5)):
    m = estimator_moments(scheme, 200.0, prior, loss)
    print(f"{str(loss):14s} mean {m.mean:8.3f}  sd {m.sd:7.3f}")
