"""Panel bootstrap of the ratio statistic.

The change point and the residuals are computed once.  Each replicate then
resamples whole residual rows with replacement, centres them by the column
means of the original residuals and re-evaluates the ratio statistic.

Because the statistic depends on the data only through the column totals, a
replicate is evaluated as ``(counts - 1) @ residuals`` where ``counts`` are the
multiplicities of the drawn rows; this equals the column totals of the centred
resample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .errors import InvalidArgument, TooManyDegenerate
from .panel import (
    DEFAULT_FLOOR,
    WeightScheme,
    as_panel,
    estimate_change_point,
    ratio_functional,
    ratio_statistic,
    residuals,
)
from .results import EmpiricalDistribution, TestReport, check_alpha

POLICIES = ("redraw", "count-as-infinite")


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 2000
    seed: int | None = None
    alpha: float = 0.05
    degenerate_policy: str = "redraw"
    floor: float = DEFAULT_FLOOR
    workers: int = 1
    max_degenerate: float = 0.01

    def __post_init__(self):
        if int(self.B) < 1:
            raise InvalidArgument(f"B must be positive, got {self.B}")
        check_alpha(self.alpha)
        if self.degenerate_policy not in POLICIES:
            raise InvalidArgument(f"degenerate_policy must be one of {POLICIES}")


def resample_indices(n_panels: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Row indices for replicates ``start..stop-1``, shape ``(stop - start, N)``.

    Replicate ``b`` belongs to chunk ``b // rng.CHUNK`` and is drawn from the
    stream ``(seed, BOOT, chunk)``; its indices do not depend on which other
    replicates are requested.
    """
    lo = (start // _rng.CHUNK) * _rng.CHUNK
    parts = [
        _rng.stream(seed, _rng.BOOT, k).integers(0, n_panels, size=(b - a, n_panels))
        for k, a, b in _rng.chunk_ranges(lo, stop)
    ]
    idx = np.concatenate(parts) if parts else np.empty((0, n_panels), dtype=np.int64)
    return idx[start - lo :]


def resample_panels(residual_matrix, seed: int, replicate_index: int) -> np.ndarray:
    """Rows of ``residual_matrix`` drawn with replacement for one replicate."""
    e = np.asarray(residual_matrix, dtype=np.float64)
    if e.ndim != 2 or e.shape[0] < 1:
        raise InvalidArgument("residual matrix must be two-dimensional with at least one row")
    b = int(replicate_index)
    idx = resample_indices(e.shape[0], int(seed), b, b + 1)[0]
    return e[idx]


def center_bootstrap(resampled, original_residuals) -> np.ndarray:
    """Subtract the column means of the original residuals from a resample."""
    r = np.asarray(resampled, dtype=np.float64)
    e = np.asarray(original_residuals, dtype=np.float64)
    if r.shape[1:] != e.shape[1:]:
        raise InvalidArgument(f"shape mismatch: resample {r.shape} vs residuals {e.shape}")
    return r - e.mean(axis=0)


def bootstrap_statistic(residual_matrix, indices, floor: float = DEFAULT_FLOOR) -> float:
    """Ratio statistic of the centred resample given by explicit row ``indices``.

    Returns ``nan`` when a denominator is degenerate.
    """
    e = np.asarray(residual_matrix, dtype=np.float64)
    y = center_bootstrap(e[np.asarray(indices)], e)
    path = np.cumsum(y, axis=1).sum(axis=0)
    return float(ratio_functional(path[None, :], floor)[0][0])


def replicate_paths(residual_matrix, indices) -> np.ndarray:
    """Partial-sum paths of centred resamples, one row per replicate."""
    e = np.asarray(residual_matrix, dtype=np.float64)
    idx = np.asarray(indices)
    reps, n = idx.shape
    counts = np.bincount((idx + n * np.arange(reps)[:, None]).ravel(), minlength=reps * n)
    weights = counts.reshape(reps, n).astype(np.float64) - 1.0
    return np.cumsum(weights @ e, axis=1)


def _replicate_values(e: np.ndarray, seed: int, start: int, stop: int, floor: float, workers: int):
    n = e.shape[0]

    def chunk(k, lo, hi):
        idx = resample_indices(n, seed, lo, hi)
        vals, degenerate, _ = ratio_functional(replicate_paths(e, idx), floor)
        return vals, degenerate

    parts = _rng.map_ordered(chunk, _rng.chunk_ranges(start, stop), workers)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def residual_bootstrap(residual_matrix, config: BootstrapConfig) -> EmpiricalDistribution:
    """Bootstrap distribution given precomputed residuals."""
    e = np.asarray(residual_matrix, dtype=np.float64)
    if e.ndim != 2 or e.shape[1] < 4:
        raise InvalidArgument("residual matrix must be (N, T) with T >= 4")
    seed = _rng.resolve_seed(config.seed)
    B = int(config.B)
    if config.degenerate_policy == "count-as-infinite":
        vals, degenerate = _replicate_values(e, seed, 0, B, config.floor, config.workers)
        vals[degenerate] = np.inf
        return EmpiricalDistribution(vals, n_degenerate=int(degenerate.sum()))
    limit = int(config.max_degenerate * B)
    accepted: list[np.ndarray] = []
    n_ok = n_bad = 0
    start, stop = 0, B
    while n_ok < B:
        vals, degenerate = _replicate_values(e, seed, start, stop, config.floor, config.workers)
        n_bad += int(degenerate.sum())
        if n_bad > limit:
            raise TooManyDegenerate(
                f"{n_bad} degenerate bootstrap replicates exceed the limit of {limit} for B={B}",
                n_degenerate=n_bad,
            )
        good = vals[~degenerate][: B - n_ok]
        accepted.append(good)
        n_ok += good.size
        start = -(-stop // _rng.CHUNK) * _rng.CHUNK
        stop = start + (B - n_ok)
    return EmpiricalDistribution(np.concatenate(accepted), n_degenerate=n_bad)


def bootstrap_distribution(data, weights: WeightScheme = None, config: BootstrapConfig | None = None):
    """Bootstrap distribution of the ratio statistic.

    Returns ``(distribution, tau_hat)``.
    """
    config = config or BootstrapConfig()
    y = as_panel(data, min_time=4)
    est = estimate_change_point(y, weights)
    e = residuals(y, est.tau_hat)
    return residual_bootstrap(e, config), est.tau_hat


def bootstrap_p_value(distribution: EmpiricalDistribution, statistic: float) -> float:
    """Add-one p-value ``(1 + #{R* >= R}) / (B + 1)``."""
    return (1 + distribution.count_at_least(statistic)) / (distribution.size + 1)


def bootstrap_test(
    data, weights: WeightScheme = None, config: BootstrapConfig | None = None, keep_distribution: bool = True
) -> TestReport:
    """Bootstrap test for a common change in panel means.

    Critical value is the ``ceil((1 - alpha) B)``-th order statistic; the
    p-value is ``(1 + #{R* >= R}) / (B + 1)``.
    """
    config = config or BootstrapConfig()
    seed = _rng.resolve_seed(config.seed)
    if config.seed is None:
        config = BootstrapConfig(**{**config.__dict__, "seed": seed})
    y = as_panel(data, min_time=4)
    if y.shape[0] < 2:
        raise InvalidArgument("the bootstrap test needs at least two panels")
    stat = ratio_statistic(y, config.floor)
    dist, tau_hat = bootstrap_distribution(y, weights, config)
    cv = dist.critical_value(config.alpha)
    return TestReport(
        statistic=stat,
        method="bootstrap",
        alpha=config.alpha,
        critical_value=cv,
        p_value=bootstrap_p_value(dist, stat),
        reject=bool(stat > cv),
        tau_hat=tau_hat,
        diagnostics={
            "B": int(config.B),
            "seed": seed,
            "n_degenerate": dist.n_degenerate,
            "degenerate_policy": config.degenerate_policy,
        },
        distribution=dist if keep_distribution else None,
    )
