"""Simulation laboratory: scenario generators and empirical size/power tables.

Every replicate derives all of its randomness from ``(seed, replicate)``:
panel errors, change sizes, limit-law draws and bootstrap resamples each get
their own stream, so a scenario result does not depend on execution order.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.signal import lfilter

from . import rng as _rng
from .asymptotic import asymptotic_test
from .bootstrap import BootstrapConfig, bootstrap_test
from .correlation import KernelSpec
from .errors import InvalidArgument, NonStationaryParams, PanelTestError
from .panel import estimate_change_point, power_weights

BURN_IN = 500


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation design.

    ``tau=None`` (or ``tau == T``) is the no-change scenario.  The first
    ``floor(change_fraction * N)`` panels change; ``delta_law`` is
    ``("uniform", a, b)`` or ``("fixed", delta)``.  ``mu`` is ``None`` for zero
    panel means or a length-``N`` sequence of offsets.
    """

    T: int = 10
    N: int = 50
    process: str = "iid"
    phi: float = 0.3
    garch: tuple[float, float, float] = (1.0, 0.1, 0.2)
    innovation: str = "normal"
    df: float = 5.0
    standardize: bool = False
    sigma: float = 1.0
    tau: Optional[int] = None
    change_fraction: float = 0.0
    delta_law: tuple = ("uniform", 1.0, 3.0)
    mu: Optional[tuple] = None
    reps: int = 1000
    alpha: float = 0.05
    B: int = 2000
    M: int = 2000
    seed: int = 0
    weight_exponent: float = 2.0
    kernel: str = "parzen"
    h: float = 2.0
    burn_in: int = BURN_IN
    asymptotic: bool = True
    bootstrap: bool = True

    def __post_init__(self):
        if self.T < 2 or self.N < 1:
            raise InvalidArgument("need T >= 2 and N >= 1")
        if self.tau is not None and not 2 <= self.tau <= self.T:
            raise InvalidArgument(f"tau must lie in 2..{self.T}")
        if not 0.0 <= self.change_fraction <= 1.0:
            raise InvalidArgument("change_fraction must lie in [0, 1]")
        if self.process not in ("iid", "ar1", "garch"):
            raise InvalidArgument(f"unknown process {self.process!r}")
        if self.innovation not in ("normal", "t"):
            raise InvalidArgument(f"unknown innovation {self.innovation!r}")
        if self.delta_law[0] not in ("uniform", "fixed"):
            raise InvalidArgument(f"unknown delta law {self.delta_law[0]!r}")
        if self.mu is not None and len(self.mu) != self.N:
            raise InvalidArgument("mu must have one offset per panel")
        if self.reps < 1:
            raise InvalidArgument("reps must be positive")

    @property
    def change_time(self) -> int:
        return self.T if self.tau is None else int(self.tau)

    @property
    def n_changed(self) -> int:
        if self.change_time == self.T:
            return 0
        return int(math.floor(round(self.change_fraction * self.N, 9)))

    def label(self) -> str:
        innov = "N(0,1)" if self.innovation == "normal" else f"t{self.df:g}"
        frac = "H0" if self.n_changed == 0 else f"{self.change_fraction:.0%}@tau={self.change_time}"
        return f"T={self.T} N={self.N} {self.process} {innov} {frac}"


@dataclass
class ScenarioResult:
    spec: ScenarioSpec
    rejection_rate_asymptotic: Optional[float]
    rejection_rate_bootstrap: Optional[float]
    tau_hat_histogram: dict[int, int]
    failures: dict[str, int] = field(default_factory=dict)
    degenerate: dict[str, int] = field(default_factory=dict)
    wall_time: float = 0.0

    def tau_hat_frequency(self, t: int) -> float:
        return self.tau_hat_histogram.get(int(t), 0) / self.spec.reps

    def to_dict(self) -> dict:
        out = asdict(self)
        out["spec"] = asdict(self.spec)
        out["tau_hat_histogram"] = {str(k): v for k, v in sorted(self.tau_hat_histogram.items())}
        return out


def _innovations(innovation: str, df: float, standardize: bool, gen, shape) -> np.ndarray:
    if innovation == "normal":
        return gen.standard_normal(shape)
    z = gen.standard_t(df, shape)
    if standardize:
        z /= math.sqrt(df / (df - 2.0))
    return z


def _check_params(process: str, phi: float, garch: Sequence[float]):
    if process == "ar1" and not abs(phi) < 1:
        raise NonStationaryParams(f"AR(1) needs |phi| < 1, got {phi}")
    if process == "garch":
        a0, a1, b1 = garch
        if a0 <= 0 or a1 < 0 or b1 < 0 or a1 + b1 >= 1:
            raise NonStationaryParams(f"GARCH(1,1) needs a0 > 0, a1, b1 >= 0, a1 + b1 < 1; got {tuple(garch)}")


def error_matrix(
    process: str,
    innovation: str,
    T: int,
    N: int,
    gen: np.random.Generator,
    phi: float = 0.3,
    garch: Sequence[float] = (1.0, 0.1, 0.2),
    df: float = 5.0,
    standardize: bool = False,
    burn_in: int = BURN_IN,
) -> np.ndarray:
    """``(N, T)`` error matrix; row ``i`` uses the ``i``-th block of ``gen``'s output."""
    _check_params(process, phi, garch)
    if process == "iid":
        return _innovations(innovation, df, standardize, gen, (N, T))
    z = _innovations(innovation, df, standardize, gen, (N, burn_in + T))
    if process == "ar1":
        return lfilter([1.0], [1.0, -phi], z, axis=1)[:, burn_in:]
    a0, a1, b1 = garch
    eps = np.empty_like(z)
    s2 = np.full(N, a0 / (1.0 - a1 - b1))
    eps[:, 0] = np.sqrt(s2) * z[:, 0]
    for k in range(1, z.shape[1]):
        s2 = a0 + a1 * eps[:, k - 1] ** 2 + b1 * s2
        eps[:, k] = np.sqrt(s2) * z[:, k]
    return eps[:, burn_in:]


def gen_errors(
    process: str, innovation: str, T: int, seed: int, panel_index: int = 0, **params
) -> np.ndarray:
    """Error vector of panel ``panel_index`` for the data stream ``seed``.

    Identical to row ``panel_index`` of the matrix used by :func:`gen_panel_data`
    with the same replicate seed.
    """
    gen = _rng.stream(seed, _rng.DATA)
    return error_matrix(process, innovation, T, int(panel_index) + 1, gen, **params)[-1]


def gen_panel_data(spec: ScenarioSpec, replicate_seed: int) -> np.ndarray:
    """Panel ``Y[i, t] = mu_i + delta_i 1{t > tau} + sigma e[i, t]`` for one replicate."""
    gen = _rng.stream(replicate_seed, _rng.DATA)
    e = error_matrix(
        spec.process,
        spec.innovation,
        spec.T,
        spec.N,
        gen,
        phi=spec.phi,
        garch=spec.garch,
        df=spec.df,
        standardize=spec.standardize,
        burn_in=spec.burn_in,
    )
    y = spec.sigma * e
    if spec.mu is not None:
        y += np.asarray(spec.mu, dtype=np.float64)[:, None]
    k = spec.n_changed
    if k:
        law = spec.delta_law
        if law[0] == "uniform":
            delta = _rng.stream(replicate_seed, _rng.DATA, 1).uniform(law[1], law[2], k)
        else:
            delta = np.full(k, float(law[1]))
        y[:k, spec.change_time :] += delta[:, None]
    return y


def replicate_seed(spec: ScenarioSpec, replicate: int) -> int:
    return _rng.derive_seed(spec.seed, replicate)


def _run_block(spec: ScenarioSpec, reps: Sequence[int]):
    weights = power_weights(spec.weight_exponent)
    kernel = KernelSpec.named(spec.kernel, spec.h)
    tally = Counter()
    taus = Counter()
    for rep in reps:
        rs = replicate_seed(spec, rep)
        y = gen_panel_data(spec, rs)
        taus[estimate_change_point(y, weights).tau_hat] += 1
        if spec.asymptotic:
            try:
                rep_a = asymptotic_test(
                    y, spec.alpha, weights, kernel, spec.M, _rng.derive_seed(rs, _rng.MVN), keep_distribution=False
                )
                tally["asymptotic"] += rep_a.reject
                tally["degenerate_asymptotic"] += rep_a.diagnostics["n_degenerate"]
            except PanelTestError:
                tally["failed_asymptotic"] += 1
        if spec.bootstrap:
            cfg = BootstrapConfig(B=spec.B, seed=_rng.derive_seed(rs, _rng.BOOT), alpha=spec.alpha)
            try:
                rep_b = bootstrap_test(y, weights, cfg, keep_distribution=False)
                tally["bootstrap"] += rep_b.reject
                tally["degenerate_bootstrap"] += rep_b.diagnostics["n_degenerate"]
            except PanelTestError:
                tally["failed_bootstrap"] += 1
    return tally, taus


def run_scenario(spec: ScenarioSpec, workers: int = 1) -> ScenarioResult:
    """Replicate a scenario ``spec.reps`` times and tally rejections and change-point estimates.

    Failed replicates (any library error) count as non-rejections and are
    reported in ``failures``.
    """
    t0 = time.perf_counter()
    reps = list(range(spec.reps))
    if workers and workers > 1:
        blocks = [reps[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, [spec] * len(blocks), blocks))
    else:
        parts = [_run_block(spec, reps)]
    tally, taus = Counter(), Counter()
    for a, b in parts:
        tally.update(a)
        taus.update(b)
    n = spec.reps
    return ScenarioResult(
        spec=spec,
        rejection_rate_asymptotic=tally["asymptotic"] / n if spec.asymptotic else None,
        rejection_rate_bootstrap=tally["bootstrap"] / n if spec.bootstrap else None,
        tau_hat_histogram=dict(sorted(taus.items())),
        failures={k[7:]: v for k, v in tally.items() if k.startswith("failed_")},
        degenerate={k[11:]: v for k, v in tally.items() if k.startswith("degenerate_")},
        wall_time=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# reference tables
# ---------------------------------------------------------------------------

PROCESSES = ("iid", "ar1", "garch")
INNOVATIONS = ("normal", "t")

# specificity under no change: (T, N, innovation) -> {process: (asymptotic, bootstrap)}
TABLE1 = {
    (10, 50, "normal"): {"iid": (0.942, 0.959), "ar1": (0.932, 0.962), "garch": (0.952, 0.968)},
    (10, 50, "t"): {"iid": (0.950, 0.967), "ar1": (0.933, 0.962), "garch": (0.947, 0.966)},
    (10, 200, "normal"): {"iid": (0.950, 0.964), "ar1": (0.938, 0.968), "garch": (0.950, 0.968)},
    (10, 200, "t"): {"iid": (0.950, 0.964), "ar1": (0.934, 0.964), "garch": (0.941, 0.963)},
    (25, 50, "normal"): {"iid": (0.945, 0.961), "ar1": (0.933, 0.965), "garch": (0.947, 0.963)},
    (25, 50, "t"): {"iid": (0.949, 0.964), "ar1": (0.929, 0.964), "garch": (0.947, 0.963)},
    (25, 200, "normal"): {"iid": (0.951, 0.962), "ar1": (0.928, 0.964), "garch": (0.953, 0.968)},
    (25, 200, "t"): {"iid": (0.954, 0.965), "ar1": (0.931, 0.966), "garch": (0.953, 0.967)},
}

# power with tau = floor(T/2): (fraction, T, N, innovation) -> {process: (asymptotic, bootstrap)}
TABLE2 = {
    (0.33, 10, 50, "normal"): {"iid": (0.23, 0.06), "ar1": (0.26, 0.07), "garch": (0.19, 0.05)},
    (0.33, 10, 50, "t"): {"iid": (0.18, 0.05), "ar1": (0.20, 0.06), "garch": (0.20, 0.05)},
    (0.33, 10, 200, "normal"): {"iid": (0.45, 0.05), "ar1": (0.48, 0.05), "garch": (0.39, 0.05)},
    (0.33, 10, 200, "t"): {"iid": (0.36, 0.05), "ar1": (0.39, 0.05), "garch": (0.39, 0.05)},
    (0.33, 25, 50, "normal"): {"iid": (0.38, 0.05), "ar1": (0.39, 0.05), "garch": (0.31, 0.05)},
    (0.33, 25, 50, "t"): {"iid": (0.30, 0.05), "ar1": (0.30, 0.05), "garch": (0.31, 0.06)},
    (0.33, 25, 200, "normal"): {"iid": (0.68, 0.05), "ar1": (0.70, 0.05), "garch": (0.58, 0.05)},
    (0.33, 25, 200, "t"): {"iid": (0.56, 0.05), "ar1": (0.57, 0.05), "garch": (0.59, 0.05)},
    (0.66, 10, 50, "normal"): {"iid": (0.45, 0.39), "ar1": (0.49, 0.46), "garch": (0.38, 0.10)},
    (0.66, 10, 50, "t"): {"iid": (0.36, 0.10), "ar1": (0.37, 0.14), "garch": (0.39, 0.15)},
    (0.66, 10, 200, "normal"): {"iid": (0.77, 0.59), "ar1": (0.81, 0.93), "garch": (0.68, 0.05)},
    (0.66, 10, 200, "t"): {"iid": (0.64, 0.05), "ar1": (0.69, 0.12), "garch": (0.69, 0.10)},
    (0.66, 25, 50, "normal"): {"iid": (0.69, 0.08), "ar1": (0.70, 0.11), "garch": (0.58, 0.05)},
    (0.66, 25, 50, "t"): {"iid": (0.56, 0.05), "ar1": (0.57, 0.06), "garch": (0.59, 0.06)},
    (0.66, 25, 200, "normal"): {"iid": (0.95, 0.06), "ar1": (0.96, 0.05), "garch": (0.91, 0.05)},
    (0.66, 25, 200, "t"): {"iid": (0.87, 0.05), "ar1": (0.89, 0.05), "garch": (0.91, 0.05)},
    (1.0, 10, 50, "normal"): {"iid": (0.64, 0.92), "ar1": (0.67, 0.84), "garch": (0.56, 0.58)},
    (1.0, 10, 50, "t"): {"iid": (0.52, 0.37), "ar1": (0.55, 0.45), "garch": (0.55, 0.55)},
    (1.0, 10, 200, "normal"): {"iid": (0.93, 1.00), "ar1": (0.95, 1.00), "garch": (0.87, 0.77)},
    (1.0, 10, 200, "t"): {"iid": (0.85, 0.36), "ar1": (0.87, 0.74), "garch": (0.87, 0.72)},
    (1.0, 25, 50, "normal"): {"iid": (0.87, 0.84), "ar1": (0.88, 0.85), "garch": (0.79, 0.11)},
    (1.0, 25, 50, "t"): {"iid": (0.76, 0.08), "ar1": (0.77, 0.11), "garch": (0.79, 0.20)},
    (1.0, 25, 200, "normal"): {"iid": (1.00, 0.97), "ar1": (1.00, 0.97), "garch": (0.99, 0.05)},
    (1.0, 25, 200, "t"): {"iid": (0.98, 0.05), "ar1": (0.98, 0.05), "garch": (0.99, 0.07)},
}

# early change, all panels changed, iid normal: (T, N, tau) -> (asymptotic, bootstrap)
TABLE3 = {
    (10, 50, 3): (0.56, 0.08),
    (10, 200, 3): (0.87, 0.05),
    (25, 50, 5): (0.63, 0.05),
    (25, 200, 5): (0.92, 0.05),
}


@dataclass(frozen=True)
class TableCell:
    table: str
    key: tuple
    process: str
    spec: ScenarioSpec
    reference: tuple[float, float]


def table_cells(table_id: str, base: ScenarioSpec | None = None) -> list[TableCell]:
    """Scenario specs for every cell of a reference table."""
    base = base or ScenarioSpec()
    table_id = table_id.upper()
    cells = []
    if table_id == "T1":
        for (T, N, innov), row in TABLE1.items():
            for proc, reference in row.items():
                spec = replace(base, T=T, N=N, innovation=innov, process=proc, tau=None, change_fraction=0.0)
                cells.append(TableCell("T1", (T, N, innov), proc, spec, reference))
    elif table_id == "T2":
        for (frac, T, N, innov), row in TABLE2.items():
            for proc, reference in row.items():
                spec = replace(
                    base, T=T, N=N, innovation=innov, process=proc, tau=T // 2, change_fraction=frac
                )
                cells.append(TableCell("T2", (frac, T, N, innov), proc, spec, reference))
    elif table_id == "T3":
        for (T, N, tau), reference in TABLE3.items():
            spec = replace(base, T=T, N=N, innovation="normal", process="iid", tau=tau, change_fraction=1.0)
            cells.append(TableCell("T3", (T, N, tau), "iid", spec, reference))
    else:
        raise InvalidArgument(f"unknown table {table_id!r}; expected T1, T2 or T3")
    return cells


def reproduce_table(
    table_id: str,
    scale: float = 1.0,
    scale_B: float | None = None,
    base: ScenarioSpec | None = None,
    select=None,
    workers: int = 1,
    progress=None,
    reps: int | None = None,
    B: int | None = None,
    M: int | None = None,
) -> list[dict]:
    """Run the cells of a reference table and compare with the reference values.

    ``reps = ceil(5000 * scale)``; ``B`` and ``M`` are ``ceil(2000 * scale_B)``
    (``scale_B`` defaults to ``scale``); explicit ``reps``, ``B`` or ``M``
    override the scaled values.  ``select`` optionally filters cells.
    For T1 the reported numbers are specificities (one minus the rejection
    rate); for T2 and T3 rejection rates.  Returns one row per cell and method.
    """
    if not 0 < scale <= 1:
        raise InvalidArgument("scale must lie in (0, 1]")
    scale_B = scale if scale_B is None else scale_B
    base = base or ScenarioSpec()
    base = replace(
        base,
        reps=reps or math.ceil(5000 * scale),
        B=B or max(math.ceil(2000 * scale_B), 100),
        M=M or max(math.ceil(2000 * scale_B), 100),
    )
    rows = []
    for cell in table_cells(table_id, base):
        if select is not None and not select(cell):
            continue
        res = run_scenario(cell.spec, workers)
        for method, reference, rate in (
            ("asymptotic", cell.reference[0], res.rejection_rate_asymptotic),
            ("bootstrap", cell.reference[1], res.rejection_rate_bootstrap),
        ):
            if rate is None:
                continue
            ours = 1.0 - rate if cell.table == "T1" else rate
            rows.append(
                {
                    "table": cell.table,
                    "cell": list(cell.key),
                    "process": cell.process,
                    "method": method,
                    "reference": reference,
                    "ours": ours,
                    "abs_diff": abs(ours - reference),
                    "reps": cell.spec.reps,
                    "B": cell.spec.B,
                    "M": cell.spec.M,
                    "failures": res.failures.get(method, 0),
                    "wall_time": res.wall_time,
                }
            )
        if progress is not None:
            progress(cell, res)
    return rows
