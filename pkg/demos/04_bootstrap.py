"""The panel bootstrap in detail.

Residual rows are resampled with replacement, centred by the original column
means and pushed through the ratio functional.  Replicates are addressed by
index, so results do not depend on the number of worker threads.
"""

import numpy as np

from shortpanel import BootstrapConfig, bootstrap_distribution, center_bootstrap, resample_panels, residuals

rng = np.random.default_rng(11)
y = rng.standard_normal((60, 10))

dist, tau_hat = bootstrap_distribution(y, config=BootstrapConfig(B=2000, seed=5))
print(f"tau_hat={tau_hat}  95% quantile={dist.critical_value(0.05):.2f}  degenerate={dist.n_degenerate}")

# one replicate by hand
e = residuals(y, tau_hat)
rep = center_bootstrap(resample_panels(e, seed=5, replicate_index=0), e)
print("replicate 0 column means:", np.round(rep.mean(axis=0), 3))

# same seed, eight threads: identical sample
par, _ = bootstrap_distribution(y, config=BootstrapConfig(B=2000, seed=5, workers=8))
print("bit-identical across workers:", np.array_equal(dist.sample, par.sample))

# near-duplicate panels make many replicates degenerate; either redraw or count them as +inf
few = rng.standard_normal((3, 5))
inf_dist, _ = bootstrap_distribution(few, config=BootstrapConfig(B=500, seed=1, degenerate_policy="count-as-infinite"))
print("count-as-infinite: infinite replicates =", inf_dist.n_degenerate)
