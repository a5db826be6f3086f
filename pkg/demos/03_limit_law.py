"""Correlation tables, limit covariances and simulated critical values.

``Lambda`` is the covariance of the limit of the partial-sum process under no
change; ``Gamma(tau)`` that of cumulative residual sums when the change sits
at ``tau``.  For ``tau = T`` both give the same law of the functional.
"""

import numpy as np
from scipy.stats import ks_2samp

from shortpanel import (
    KernelSpec,
    analytic_structure,
    asymptotic_critical_value,
    build_gamma,
    build_lambda,
    estimate_structure,
    simulate_functional,
)

iid = analytic_structure("iid", 5)
print("iid Lambda (min(t, v)):\n", build_lambda(iid))

ar = analytic_structure("ar1", 6, phi=0.3)
print("AR(1) r(t):", np.round(ar.r[1:], 4))

# kernel smoothing of estimated autocorrelations
rho = np.array([1.0, 0.35, 0.1, -0.02, 0.01, 0.0])
print("Parzen h=2 r(t):", np.round(estimate_structure(rho, KernelSpec(h=2)).r[1:], 4))

g = build_gamma(iid, 3)
print("Gamma(3) row 3:", g[2])

for T in (4, 10, 25):
    cv, dist = asymptotic_critical_value(build_lambda(analytic_structure("iid", T)), 0.05, M=5000, seed=1)
    print(f"T={T:2d}: 5% critical value {cv:7.2f}  (median {np.median(dist.sample):.2f})")

s = analytic_structure("iid", 10)
a = simulate_functional(build_lambda(s), 5000, seed=1)
b = simulate_functional(build_gamma(s, 10), 5000, seed=2)
print("KS distance Lambda vs Gamma(T):", round(ks_2samp(a.sample, b.sample).statistic, 4))
