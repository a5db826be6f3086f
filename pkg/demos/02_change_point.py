"""Locating the common change point.

The criterion at ``t`` is the within-segment sum of squares of the first ``t``
observations divided by ``N w(t)``.  With ``w(t) = t**2`` the criterion
decreases in ``t`` under no change, so ``tau_hat = T`` signals "no change".
"""

import numpy as np

from shortpanel import estimate_change_point, power_weights, residuals

rng = np.random.default_rng(7)
N, T = 200, 10

y = 0.1 * rng.standard_normal((N, T))
y[:, 5:] += 0.2
est = estimate_change_point(y)
print("shift after t=5 ->", est.tau_hat)
for t, v in zip(est.times, est.objective):
    print(f"  t={t:2d}  {v:.6f}")

noise = rng.standard_normal((N, T))
print("pure noise ->", estimate_change_point(noise).tau_hat)

# a flatter weight makes the estimator less eager to pick T
print("w(t)=t^1.5 ->", estimate_change_point(noise, power_weights(1.5)).tau_hat)

# residuals remove both segment means panel by panel
e = residuals(y, est.tau_hat)
print("segment sums:", np.abs(e[:, :5].sum(axis=1)).max(), np.abs(e[:, 5:].sum(axis=1)).max())
