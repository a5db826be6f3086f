"""Ratio-type test for a common change in means of short panels.

The statistic compares forward and backward centred partial sums of the
aggregated panel; the unknown error variance cancels.  Critical values come
either from a simulated Gaussian limit law with kernel-smoothed correlation
estimates or from a panel bootstrap of residuals.
"""

__version__ = "0.1.0"

from .asymptotic import (
    asymptotic_critical_value,
    asymptotic_test,
    build_gamma,
    build_lambda,
    limit_functional,
    sample_mvn,
    simulate_functional,
)
from .bootstrap import (
    BootstrapConfig,
    bootstrap_distribution,
    bootstrap_statistic,
    bootstrap_test,
    center_bootstrap,
    resample_panels,
)
from .correlation import (
    CorrelationStructure,
    KernelSpec,
    analytic_structure,
    estimate_structure,
    parzen_kernel,
    rho_hat,
    trivial_kernel,
)
from .errors import PanelTestError
from .io import IngestOptions, load_panel_csv
from .panel import (
    ChangePointEstimate,
    as_panel,
    estimate_change_point,
    partial_sum_path,
    power_weights,
    ratio_statistic,
    residuals,
    sigma2_hat,
)
from .results import EmpiricalDistribution, TestReport
from .simlab import ScenarioResult, ScenarioSpec, gen_errors, gen_panel_data, reproduce_table, run_scenario

__all__ = [
    "asymptotic_critical_value",
    "asymptotic_test",
    "build_gamma",
    "build_lambda",
    "limit_functional",
    "sample_mvn",
    "simulate_functional",
    "BootstrapConfig",
    "bootstrap_distribution",
    "bootstrap_statistic",
    "bootstrap_test",
    "center_bootstrap",
    "resample_panels",
    "CorrelationStructure",
    "KernelSpec",
    "analytic_structure",
    "estimate_structure",
    "parzen_kernel",
    "rho_hat",
    "trivial_kernel",
    "PanelTestError",
    "IngestOptions",
    "load_panel_csv",
    "ChangePointEstimate",
    "as_panel",
    "estimate_change_point",
    "partial_sum_path",
    "power_weights",
    "ratio_statistic",
    "residuals",
    "sigma2_hat",
    "EmpiricalDistribution",
    "TestReport",
    "ScenarioResult",
    "ScenarioSpec",
    "gen_errors",
    "gen_panel_data",
    "reproduce_table",
    "run_scenario",
]
