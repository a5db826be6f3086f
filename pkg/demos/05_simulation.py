"""Monte-Carlo scenarios and table reproduction at reduced scale.

Full-scale reproduction (5000 replications, B = M = 2000) takes hours; the
``scale`` argument shrinks every cell proportionally.
"""

from shortpanel import ScenarioSpec, reproduce_table, run_scenario

spec = ScenarioSpec(T=10, N=50, process="ar1", phi=0.3, tau=5, change_fraction=1.0, reps=100, B=300, M=300, seed=3)
res = run_scenario(spec)
print(spec.label())
print(f"  rejection: asymptotic {res.rejection_rate_asymptotic:.2f}, bootstrap {res.rejection_rate_bootstrap:.2f}")
print(f"  tau_hat histogram {res.tau_hat_histogram}  ({res.wall_time:.1f}s)")

rows = reproduce_table("T3", scale=100 / 5000, scale_B=0.15, base=ScenarioSpec(seed=1))
for r in rows:
    print(f"  {r['cell']} {r['method']:10s} reference={r['reference']:.2f} ours={r['ours']:.2f}")
