"""Limit covariance matrices, Monte-Carlo sampling of the limit law and the asymptotic test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .correlation import CorrelationStructure, KernelSpec, structure_from_residuals
from .errors import DegenerateDraw, InvalidArgument, NotPSD, ShortPanel, TooManyDegenerate
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

PSD_TOL = 1e-8
EIG_ZERO = 1e-12
MAX_DEGENERATE_FRACTION = 0.01


@dataclass(frozen=True)
class Factorization:
    """Eigen-factor ``F`` with ``F @ F.T`` equal to the clipped covariance."""

    factor: np.ndarray
    eigenvalues: np.ndarray
    clipped_mass: float

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues.min())


def factorize(cov, tol: float = PSD_TOL) -> Factorization:
    """Eigendecomposition with clipping of slightly negative eigenvalues.

    Raises :class:`NotPSD` when the smallest eigenvalue is below
    ``-tol * max(|eigenvalue|)``.  Eigenvalues below ``EIG_ZERO`` relative to
    the largest are treated as zero.
    """
    cov = np.asarray(cov, dtype=np.float64)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise InvalidArgument(f"covariance must be square, got shape {cov.shape}")
    scale = np.abs(cov).max() if cov.size else 0.0
    if np.abs(cov - cov.T).max(initial=0.0) > 1e-10 * max(scale, 1.0):
        raise NotPSD("covariance matrix is not symmetric")
    if scale == 0.0:
        return Factorization(np.zeros_like(cov), np.zeros(cov.shape[0]), 0.0)
    lam, vec = np.linalg.eigh((cov + cov.T) / 2.0)
    top = np.abs(lam).max()
    if lam.min() < -tol * top:
        raise NotPSD(
            f"covariance has eigenvalue {lam.min():.3g} (largest {top:.3g})",
            min_eigenvalue=float(lam.min()),
        )
    neg = lam < 0
    clipped = float(-lam[neg].sum() / top)
    # round-off sized eigenvalues are exact zeros; their square roots would add noise
    keep = lam > EIG_ZERO * top
    return Factorization(vec * np.sqrt(np.where(keep, lam, 0.0)), lam, clipped)


def build_lambda(structure: CorrelationStructure, tol: float = PSD_TOL) -> np.ndarray:
    """Covariance of the partial-sum limit under no change.

    Diagonal ``r(t)``; off-diagonal ``r(t) + R(t, v)`` for ``t < v``.
    """
    T = structure.T
    r, R = structure.r, structure.R
    lam = np.empty((T, T))
    for t in range(1, T + 1):
        lam[t - 1, t - 1] = r[t]
        for v in range(t + 1, T + 1):
            lam[t - 1, v - 1] = lam[v - 1, t - 1] = r[t] + R[t, v]
    factorize(lam, tol)
    return lam


def build_gamma(structure: CorrelationStructure, tau: int, tol: float = PSD_TOL) -> np.ndarray:
    """Covariance of the limit of cumulative residual sums given a change at ``tau``.

    Row and column ``tau`` are exactly zero.  For ``tau < T`` row ``T`` vanishes
    as well (up to rounding) because post-change residuals sum to zero.
    """
    T = structure.T
    tau = int(tau)
    if not 1 <= tau <= T:
        raise InvalidArgument(f"tau must lie in 1..{T}, got {tau}")
    r, R, S = structure.r, structure.R, structure.S
    m = T - tau
    g = np.zeros((T, T))

    def diag(t):
        if t < tau:
            return r[t] + t * t / tau**2 * r[tau] - 2 * t / tau * (r[t] + R[t, tau])
        if t == tau:
            return 0.0
        k = t - tau
        return r[k] + k * k / m**2 * r[m] - 2 * k / m * (r[k] + R[k, m])

    def off(t, v):
        if t == tau or v == tau:
            return 0.0
        if v < tau:
            return (
                r[t]
                + R[t, v]
                + t * v / tau**2 * r[tau]
                - v / tau * (r[t] + R[t, tau])
                - t / tau * (r[v] + R[v, tau])
            )
        if t < tau:
            d = tau + 1 - t
            return (
                S[t, v, d]
                + t * (v - tau) / (tau * m) * R[tau, T]
                - (v - tau) / m * S[t, T, d]
                - t / tau * R[tau, v]
            )
        a, b = t - tau, v - tau
        return (
            r[a]
            + R[a, b]
            + a * b / m**2 * r[m]
            - b / m * (r[a] + R[a, m])
            - a / m * (r[b] + R[b, m])
        )

    for t in range(1, T + 1):
        g[t - 1, t - 1] = diag(t)
        for v in range(t + 1, T + 1):
            g[t - 1, v - 1] = g[v - 1, t - 1] = off(t, v)
    factorize(g, tol)
    return g


def sample_mvn(cov, M: int, seed: int, start: int = 0, workers: int = 1, tol: float = PSD_TOL) -> np.ndarray:
    """Draws ``M`` zero-mean normal vectors, ``X = V diag(sqrt(max(lambda, 0))) z``.

    Draws are indexed; chunk ``k`` of ``rng.CHUNK`` draws uses the stream
    ``(seed, MVN, k)`` so the output is independent of ``workers``.
    """
    fac = factorize(cov, tol)
    return _draw(fac.factor, int(M), int(seed), int(start), workers)


def _draw(factor: np.ndarray, M: int, seed: int, start: int, workers: int) -> np.ndarray:
    dim = factor.shape[0]

    def chunk(k, lo, hi):
        z = _rng.stream(seed, _rng.MVN, k).standard_normal((hi - lo, dim))
        return z @ factor.T

    parts = _rng.map_ordered(chunk, _rng.chunk_ranges(start, start + M), workers)
    return np.concatenate(parts) if parts else np.empty((0, dim))


def limit_functional(x, floor: float = DEFAULT_FLOOR) -> float:
    """The limit-law functional of one path ``x = (X_1..X_T)``.

    Raises :class:`DegenerateDraw` if a denominator falls below ``floor``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 4:
        raise ShortPanel("the functional needs a path of length T >= 4")
    values, degenerate, first_bad = ratio_functional(x[None, :], floor)
    if degenerate[0]:
        raise DegenerateDraw(f"denominator vanishes at t={int(first_bad[0])}", t=int(first_bad[0]))
    return float(values[0])


def simulate_functional(
    cov,
    M: int = 2000,
    seed: int | None = None,
    floor: float = DEFAULT_FLOOR,
    workers: int = 1,
    tol: float = PSD_TOL,
    max_degenerate: float = MAX_DEGENERATE_FRACTION,
) -> EmpiricalDistribution:
    """``M`` accepted functional values under ``N(0, cov)``.

    Degenerate draws are discarded and replaced by further draws taken from the
    next aligned chunks; more than ``max_degenerate * M`` of them raises
    :class:`TooManyDegenerate`.
    """
    M = int(M)
    if M < 1:
        raise InvalidArgument("M must be positive")
    seed = _rng.resolve_seed(seed)
    if np.shape(cov)[0] < 4:
        raise ShortPanel("the functional needs dimension T >= 4")
    fac = factorize(cov, tol)
    limit = int(max_degenerate * M)
    accepted: list[np.ndarray] = []
    n_ok = n_bad = 0
    start, stop = 0, M
    while n_ok < M:
        x = _draw(fac.factor, stop - start, seed, start, workers)
        values, degenerate, _ = ratio_functional(x, floor)
        n_bad += int(degenerate.sum())
        if n_bad > limit:
            raise TooManyDegenerate(
                f"{n_bad} degenerate draws exceed the limit of {limit} for M={M}", n_degenerate=n_bad
            )
        good = values[~degenerate][: M - n_ok]
        accepted.append(good)
        n_ok += good.size
        start = -(-stop // _rng.CHUNK) * _rng.CHUNK
        stop = start + max(M - n_ok, 1)
    return EmpiricalDistribution(np.concatenate(accepted), n_degenerate=n_bad)


def asymptotic_critical_value(
    cov, alpha: float = 0.05, M: int = 2000, seed: int | None = None, **kwargs
) -> tuple[float, EmpiricalDistribution]:
    """Upper ``alpha`` critical value of the simulated limit law.

    Returns ``(critical_value, distribution)``.
    """
    alpha = check_alpha(alpha)
    if int(M) < 100:
        raise InvalidArgument(f"M must be at least 100, got {M}")
    dist = simulate_functional(cov, M, seed, **kwargs)
    return dist.critical_value(alpha), dist


def asymptotic_test(
    data,
    alpha: float = 0.05,
    weights: WeightScheme = None,
    kernel: KernelSpec | None = None,
    M: int = 2000,
    seed: int | None = None,
    floor: float = DEFAULT_FLOOR,
    workers: int = 1,
    keep_distribution: bool = True,
) -> TestReport:
    """Test for a common change in means using the estimated limit law.

    The correlation structure is estimated from residuals at the estimated
    change point, smoothed with ``kernel`` (Parzen, ``h = 2`` by default).
    """
    alpha = check_alpha(alpha)
    y = as_panel(data, min_time=4)
    if y.shape[0] < 2:
        raise InvalidArgument("the asymptotic test needs at least two panels")
    kernel = kernel or KernelSpec()
    seed = _rng.resolve_seed(seed)
    stat = ratio_statistic(y, floor)
    est = estimate_change_point(y, weights)
    e = residuals(y, est.tau_hat)
    structure, rho, s2 = structure_from_residuals(e, kernel, floor)
    lam = build_lambda(structure)
    fac = factorize(lam)
    cv, dist = asymptotic_critical_value(lam, alpha, M, seed, floor=floor, workers=workers)
    return TestReport(
        statistic=stat,
        method="asymptotic",
        alpha=alpha,
        critical_value=cv,
        p_value=dist.exceedance(stat),
        reject=bool(stat > cv),
        tau_hat=est.tau_hat,
        diagnostics={
            "kernel": kernel.name,
            "h": kernel.h,
            "M": int(M),
            "seed": seed,
            "n_degenerate": dist.n_degenerate,
            "sigma2": s2,
            "rho": rho.tolist(),
            "min_eigenvalue": fac.min_eigenvalue,
            "clipped_mass": fac.clipped_mass,
        },
        distribution=dist if keep_distribution else None,
    )
